// sampling.hpp — seeded random generators: elements, invertible matrices,
// subspaces, random spread sets via extension walks, random equivalence
// transformations. Deterministic given the RNG state.
#pragma once

#include <random>

#include "rmc/invariants.hpp"

namespace rmc {

inline Mat random_mat(const FieldPtr& f, uint32_t r, uint32_t c, std::mt19937_64& rng) {
    Mat m(f, r, c);
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j) m.at(i, j) = (uint32_t)(rng() % f->size());
    return m;
}

inline Mat random_invertible(const FieldPtr& f, uint32_t n, std::mt19937_64& rng) {
    while (true) {
        Mat m = random_mat(f, n, n, rng);
        if (m.invertible()) return m;
    }
}

inline FieldAut random_automorphism(const FieldPtr& f, std::mt19937_64& rng) {
    return FieldAut{(uint32_t)(rng() % f->degree())};
}

/// Random F_q-subspace of M_n(F_{q^s}) of the given dimension.
inline MatrixCode random_subspace(const ContextPtr& ctx, uint32_t dim, std::mt19937_64& rng) {
    std::vector<Mat> basis;
    while (true) {
        basis.clear();
        for (uint32_t i = 0; i < dim; ++i)
            basis.push_back(random_mat(ctx->big_field(), ctx->n(), ctx->n(), rng));
        try {
            return MatrixCode(ctx, basis);
        } catch (const DimensionError&) {
            // dependent sample, draw again
        }
    }
}

/// Random semifield spread set produced by a randomized seed-extension walk:
/// at each level pick a random seed element keeping the span all-invertible,
/// restarting on dead ends.
inline MatrixCode random_spread_set(const ContextPtr& ctx, std::mt19937_64& rng,
                                    uint32_t max_restarts = 10000) {
    static thread_local std::map<const CodeContext*, SeedSets> seed_cache;
    auto it = seed_cache.find(ctx.get());
    if (it == seed_cache.end()) it = seed_cache.emplace(ctx.get(), seed_sets(ctx)).first;
    const SeedSets& seeds = it->second;

    const bool packed_ok =
        ctx->big_field()->characteristic() == 2 && ctx->n() == 2 && ctx->big_field()->size() <= 256 && ctx->q() == 2;
    if (packed_ok) {
        PackedOps ops(ctx->big_field());
        std::vector<std::vector<uint32_t>> pseeds(ctx->ns());
        for (uint32_t k = 0; k < ctx->ns(); ++k)
            for (const auto& m : seeds.sets[k]) pseeds[k].push_back(ops.from_mat(m));
        for (uint32_t restart = 0; restart < max_restarts; ++restart) {
            std::vector<uint32_t> basis;
            std::vector<uint32_t> span{0};
            bool dead = false;
            for (uint32_t k = 0; k < ctx->ns() && !dead; ++k) {
                const auto& cands = pseeds[k];
                uint32_t tries = 0;
                const uint32_t max_tries = (uint32_t)cands.size() * 2;
                bool placed = false;
                while (tries++ < max_tries) {
                    uint32_t a = cands[rng() % cands.size()];
                    bool ok = true;
                    for (uint32_t c : span)
                        if (ops.det(c ^ a) == 0) { ok = false; break; }
                    if (ok) {
                        basis.push_back(a);
                        size_t old = span.size();
                        span.resize(old * 2);
                        for (size_t t = 0; t < old; ++t) span[old + t] = span[t] ^ a;
                        placed = true;
                        break;
                    }
                }
                if (!placed) dead = true;
            }
            if (!dead) {
                std::vector<Mat> bs;
                for (uint32_t b : basis) bs.push_back(ops.to_mat(b));
                return MatrixCode(ctx, bs);
            }
        }
        throw Error("random spread-set walk exhausted restarts");
    }

    for (uint32_t restart = 0; restart < max_restarts; ++restart) {
        std::vector<Mat> basis;
        bool dead = false;
        for (uint32_t k = 0; k < ctx->ns() && !dead; ++k) {
            const auto& cands = seeds.sets[k];
            uint32_t tries = 0;
            const uint32_t max_tries = (uint32_t)cands.size() * 2;
            bool placed = false;
            while (tries++ < max_tries) {
                const Mat& a = cands[rng() % cands.size()];
                if (basis.empty()) {
                    basis.push_back(a);
                    placed = true;
                    break;
                }
                MatrixCode c(ctx, basis);
                if (is_semifield_code_incremental(c, a)) {
                    basis.push_back(a);
                    placed = true;
                    break;
                }
            }
            if (!placed) dead = true;
        }
        if (!dead) return MatrixCode(ctx, basis);
    }
    throw Error("random spread-set walk exhausted restarts");
}

/// The transformed code { X A^rho Y : A in basis of c }.
inline MatrixCode transformed_code(const MatrixCode& c, const Mat& x, const Mat& y, FieldAut rho) {
    std::vector<Mat> basis;
    basis.reserve(c.dim());
    for (const auto& b : c.basis()) basis.push_back(x * b.map_entries(rho) * y);
    return MatrixCode(c.context(), basis);
}

}  // namespace rmc
