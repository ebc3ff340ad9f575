// bruteforce.hpp — independent small-scale pipeline: exhaustive enumeration
// of all semifield spread sets and classification by full orbit closure
// under (X, Y, rho). Ground truth for the iterative classifier at tiny
// parameters; no invariants involved.
#pragma once

#include <cmath>
#include <unordered_set>

#include "rmc/equivalence.hpp"

namespace rmc {

namespace detail {

inline std::string bitrows_key(std::vector<uint64_t> rows) {
    bitrows_rref(rows);
    std::string s;
    s.reserve(rows.size() * 8);
    for (uint64_t r : rows)
        for (int b = 0; b < 8; ++b) s.push_back((char)((r >> (8 * b)) & 255));
    return s;
}

}  // namespace detail

/// All ns-dimensional all-invertible F_2-subspaces of M_2(F_{2^s}), via RREF
/// enumeration of subspaces. Requires q = 2, n = 2 and a small ambient space.
inline std::vector<MatrixCode> enumerate_all_spread_sets(const ContextPtr& ctx) {
    if (ctx->q() != 2 || ctx->n() != 2 || ctx->big_field()->size() > 256)
        throw GuardError("exhaustive enumeration supports q=2, n=2 only");
    const uint32_t ambient = 4 * ctx->s();  // F_2-dimension of M_2(F_{2^s})
    const uint32_t ns = ctx->ns();
    // guard on the Gaussian binomial [ambient choose ns]_2
    {
        double count = 1;
        for (uint32_t i = 0; i < ns; ++i)
            count *= (std::pow(2.0, ambient - i) - 1) / (std::pow(2.0, i + 1) - 1);
        if (count > (double)(1u << 21)) throw GuardError("subspace enumeration too large");
    }
    PackedOps ops(ctx->big_field());
    const uint32_t sdeg = ctx->big_field()->degree();

    std::vector<MatrixCode> out;
    // iterate pivot-column subsets in increasing lexicographic order
    std::vector<uint32_t> piv(ns);
    for (uint32_t i = 0; i < ns; ++i) piv[i] = i;
    while (true) {
        // free positions: (row r, column c) with c > piv[r], c not a pivot
        std::vector<std::pair<uint32_t, uint32_t>> free_pos;
        std::vector<bool> is_piv(ambient, false);
        for (uint32_t p : piv) is_piv[p] = true;
        for (uint32_t r = 0; r < ns; ++r)
            for (uint32_t c = piv[r] + 1; c < ambient; ++c)
                if (!is_piv[c]) free_pos.emplace_back(r, c);
        const uint32_t nf = (uint32_t)free_pos.size();
        for (uint64_t mask = 0; mask < (1ull << nf); ++mask) {
            std::vector<uint64_t> rows(ns);
            for (uint32_t r = 0; r < ns; ++r) rows[r] = 1ull << piv[r];
            for (uint32_t t = 0; t < nf; ++t)
                if ((mask >> t) & 1) rows[free_pos[t].first] |= 1ull << free_pos[t].second;
            // all nonzero span elements invertible?
            bool ok = true;
            std::vector<uint32_t> span{0};
            for (uint64_t rbits : rows) {
                uint32_t m = packed_contract_bits(rbits, sdeg);
                size_t old = span.size();
                for (size_t u = 0; u < old && ok; ++u) {
                    uint32_t x = span[u] ^ m;
                    if (ops.det(x) == 0) ok = false;
                }
                if (!ok) break;
                span.resize(old * 2);
                for (size_t u = 0; u < old; ++u) span[old + u] = span[u] ^ m;
            }
            if (!ok) continue;
            std::vector<Mat> basis;
            for (uint64_t rbits : rows) basis.push_back(ops.to_mat(packed_contract_bits(rbits, sdeg)));
            out.emplace_back(ctx, std::move(basis));
        }
        // next pivot combination
        int32_t pos = (int32_t)ns - 1;
        while (pos >= 0 && piv[pos] == ambient - ns + pos) --pos;
        if (pos < 0) break;
        ++piv[pos];
        for (uint32_t i = (uint32_t)pos + 1; i < ns; ++i) piv[i] = piv[i - 1] + 1;
    }
    return out;
}

struct BruteForceClassification {
    uint64_t total = 0;
    std::vector<MatrixCode> reps;      // first member of each orbit, in enumeration order
    std::vector<uint64_t> orbit_sizes;
    bool orbits_cover_all = false;
};

/// Classification by orbit closure: for each unseen spread set, generate its
/// entire (X, Y, rho) orbit and mark every member. Orbits partition the
/// enumerated universe, which doubles as a completeness check.
inline BruteForceClassification brute_force_classify(const ContextPtr& ctx) {
    auto all = enumerate_all_spread_sets(ctx);
    PackedOps ops(ctx->big_field());
    const uint32_t sdeg = ctx->big_field()->degree();
    const auto& big = ctx->big_field();

    auto code_key = [&](const std::vector<uint32_t>& basis) {
        std::vector<uint64_t> rows;
        rows.reserve(basis.size());
        for (uint32_t b : basis) rows.push_back(packed_expand_bits(b, sdeg));
        return detail::bitrows_key(std::move(rows));
    };

    std::unordered_set<std::string> universe;
    std::vector<std::pair<std::string, size_t>> order;
    for (size_t i = 0; i < all.size(); ++i) {
        std::vector<uint32_t> basis;
        for (const auto& b : all[i].basis()) basis.push_back(ops.from_mat(b));
        auto key = code_key(basis);
        order.emplace_back(key, i);
        universe.insert(key);
    }

    auto gl = general_linear_group(big, 2);
    std::vector<uint32_t> glp;
    glp.reserve(gl.size());
    for (const auto& m : gl) glp.push_back(ops.from_mat(m));

    BruteForceClassification res;
    res.total = all.size();
    std::unordered_set<std::string> seen;
    for (auto& [key, idx] : order) {
        if (seen.count(key)) continue;
        std::vector<uint32_t> basis;
        for (const auto& b : all[idx].basis()) basis.push_back(ops.from_mat(b));
        std::unordered_set<std::string> orbit;
        for (FieldAut rho : big->automorphisms()) {
            std::vector<uint32_t> brho;
            brho.reserve(basis.size());
            for (uint32_t b : basis) brho.push_back(ops.map_entries(b, rho.j));
            for (uint32_t x : glp) {
                std::vector<uint32_t> xb;
                xb.reserve(basis.size());
                for (uint32_t b : brho) xb.push_back(ops.matmul(x, b));
                for (uint32_t y : glp) {
                    std::vector<uint32_t> t;
                    t.reserve(basis.size());
                    for (uint32_t b : xb) t.push_back(ops.matmul(b, y));
                    orbit.insert(code_key(t));
                }
            }
        }
        for (const auto& k : orbit) {
            if (!universe.count(k)) throw Error("internal: orbit left the spread-set universe");
            seen.insert(k);
        }
        res.reps.push_back(all[idx]);
        res.orbit_sizes.push_back(orbit.size());
    }
    uint64_t covered = 0;
    for (uint64_t s : res.orbit_sizes) covered += s;
    res.orbits_cover_all = covered == res.total && seen.size() == res.total;
    return res;
}

}  // namespace rmc
