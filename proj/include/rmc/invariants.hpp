// invariants.hpp — m-ranks of embedded spaces (direct enumeration and the
// conjugation shortcut), vector-code class labels, and the composite
// invariant key used by the classifier.
#pragma once

#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "rmc/equivalence.hpp"

namespace rmc {

struct RankMultiset {
    std::map<uint32_t, uint64_t> counts;

    uint64_t total() const {
        uint64_t t = 0;
        for (auto& [r, c] : counts) t += c;
        return t;
    }
    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (auto& [r, c] : counts) {
            if (!first) os << ',';
            os << r << ':' << c;
            first = false;
        }
        return os.str();
    }
    bool operator==(const RankMultiset&) const = default;
};

/// Field environment for m-ranks over a code context.
struct MEnv {
    uint32_t m = 0, l = 0;  // l = lcm(m, s)
    FieldPtr fqm, fql;
    Embedding sub_to_qm;   // F_q -> F_{q^m}
    Embedding qm_to_ql;    // F_{q^m} -> F_{q^L}
    Embedding big_to_ql;   // F_{q^s} -> F_{q^L}
};

inline MEnv make_menv(const ContextPtr& ctx, uint32_t m) {
    if (m == 0) throw DimensionError("m must be positive");
    MEnv env;
    env.m = m;
    env.l = std::lcm(m, ctx->s());
    const uint32_t p = ctx->big_field()->characteristic();
    const uint32_t e = ctx->sub_field()->degree();
    env.fqm = m == 1 ? ctx->sub_field() : Field::make(p, e * m);
    env.fql = env.l == ctx->s() ? ctx->big_field() : Field::make(p, e * env.l);
    auto ident = [](const FieldPtr& f) {
        return Embedding::with_image(f, f, f->generator());
    };
    env.sub_to_qm = m == 1 ? ident(ctx->sub_field()) : Embedding::find(ctx->sub_field(), env.fqm);
    env.qm_to_ql = env.fqm->same_field(*env.fql) ? ident(env.fqm) : Embedding::find(env.fqm, env.fql);
    env.big_to_ql =
        ctx->big_field()->same_field(*env.fql) ? ident(ctx->big_field()) : Embedding::find(ctx->big_field(), env.fql);
    return env;
}

/// Rank multiset of E_m(C) by direct enumeration of the F_{q^m}-span of
/// phibar(C) inside M_{ns}(F_{q^m}).
inline RankMultiset m_ranks_direct(const MatrixCode& c, uint32_t m, uint64_t guard = 1ull << 22) {
    const auto& ctx = c.context();
    MEnv env = make_menv(ctx, m);
    const uint32_t ns = ctx->ns();

    // F_{q^m}-basis of the span of the embedded phibar images
    std::vector<Mat> gens;
    {
        Mat rows(env.fqm, c.dim(), ns * ns);
        for (uint32_t i = 0; i < c.dim(); ++i) {
            Mat pb = ctx->rep().phibar(c.basis()[i]).mapped(env.sub_to_qm);
            Mat v = pb.vec();
            for (uint32_t t = 0; t < ns * ns; ++t) rows.at(i, t) = v.at(t, 0);
        }
        uint32_t d = rows.echelonize(true);
        for (uint32_t r = 0; r < d; ++r) {
            Mat g(env.fqm, ns, ns);
            for (uint32_t t = 0; t < ns * ns; ++t) g.at(t % ns, t / ns) = rows.at(r, t);
            gens.push_back(std::move(g));
        }
    }

    uint64_t span_size = 1;
    for (size_t i = 0; i < gens.size(); ++i) {
        span_size *= env.fqm->size();
        if (span_size > guard) throw GuardError("direct m-rank enumeration too large");
    }

    RankMultiset out;
    const uint32_t d = (uint32_t)gens.size();
    std::vector<uint32_t> tuple(d, 0);
    std::vector<Mat> partial(d + 1, Mat::zero(env.fqm, ns, ns));
    uint32_t level = 0;  // partial[t] valid for t <= level
    while (true) {
        for (uint32_t t = level; t < d; ++t)
            partial[t + 1] = tuple[t] ? partial[t] + gens[t].scaled(tuple[t]) : partial[t];
        level = d;
        ++out.counts[partial[d].rank()];
        uint32_t pos = d;
        while (pos > 0) {
            if (++tuple[pos - 1] < env.fqm->size()) break;
            tuple[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
        level = pos - 1;
    }
    return out;
}

/// Per-residue block multiplicities for the conjugation shortcut:
/// rank(sum a_i phibar(A_i)) = sum_{j<s} rank(sum a_i^{q^{(m-j) mod m}} A_i).
inline std::vector<uint32_t> residue_multiplicities(uint32_t m, uint32_t s) {
    std::vector<uint32_t> cnt(m, 0);
    for (uint32_t j = 0; j < s; ++j) ++cnt[(m - (j % m)) % m];
    return cnt;
}

/// Rank multiset of E_m(C) via n x n ranks over F_{q^lcm(m,s)}; identical
/// multiset to m_ranks_direct.
inline RankMultiset m_ranks_fast(const MatrixCode& c, uint32_t m, uint64_t guard = 1ull << 24) {
    const auto& ctx = c.context();
    MEnv env = make_menv(ctx, m);
    const uint32_t n = ctx->n(), s = ctx->s(), k = c.dim();
    const uint64_t qm = env.fqm->size();

    uint64_t tuples = 1;
    for (uint32_t i = 0; i < k; ++i) {
        tuples *= qm;
        if (tuples > guard) throw GuardError("fast m-rank enumeration too large");
    }

    std::vector<Mat> embbasis;
    embbasis.reserve(k);
    for (const auto& b : c.basis()) embbasis.push_back(b.mapped(env.big_to_ql));

    auto cnt = residue_multiplicities(m, s);

    // sigma^r images of every coefficient, embedded in F_{q^L}
    std::vector<std::vector<uint32_t>> coeff(qm, std::vector<uint32_t>(m));
    for (uint64_t a = 0; a < qm; ++a)
        for (uint32_t r = 0; r < m; ++r)
            coeff[a][r] = env.qm_to_ql.map(env.fqm->frobenius(ctx->q(), (uint32_t)a, r));

    RankMultiset out;
    std::vector<uint32_t> tuple(k, 0);
    // partial[t][r] = sum_{i<t} sigma^r(a_i) * A_i
    std::vector<std::vector<Mat>> partial(k + 1, std::vector<Mat>(m, Mat::zero(env.fql, n, n)));
    uint32_t level = 0;
    while (true) {
        for (uint32_t t = level; t < k; ++t)
            for (uint32_t r = 0; r < m; ++r)
                partial[t + 1][r] = tuple[t]
                                        ? partial[t][r] + embbasis[t].scaled(coeff[tuple[t]][r])
                                        : partial[t][r];
        level = k;
        uint32_t v = 0;
        for (uint32_t r = 0; r < m; ++r)
            if (cnt[r]) v += cnt[r] * partial[k][r].rank();
        ++out.counts[v];
        uint32_t pos = k;
        while (pos > 0) {
            if (++tuple[pos - 1] < qm) break;
            tuple[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
        level = pos - 1;
    }

    // divide out the kernel when the phibar images are F_{q^m}-dependent
    uint64_t zc = out.counts[0];
    if (zc > 1) {
        for (auto& [r, cq] : out.counts) {
            if (cq % zc) throw Error("internal: m-rank multiplicities not divisible by kernel size");
            cq /= zc;
        }
    }
    return out;
}

/// Fast-formula rank of a single coefficient tuple (test hook).
inline uint32_t m_rank_fast_single(const MatrixCode& c, uint32_t m,
                                   const std::vector<uint32_t>& tuple) {
    const auto& ctx = c.context();
    MEnv env = make_menv(ctx, m);
    auto cnt = residue_multiplicities(m, ctx->s());
    uint32_t v = 0;
    for (uint32_t r = 0; r < m; ++r) {
        if (!cnt[r]) continue;
        Mat acc = Mat::zero(env.fql, ctx->n(), ctx->n());
        for (uint32_t i = 0; i < c.dim(); ++i) {
            uint32_t a = env.qm_to_ql.map(env.fqm->frobenius(ctx->q(), tuple[i], r));
            if (a) acc = acc + c.basis()[i].mapped(env.big_to_ql).scaled(a);
        }
        v += cnt[r] * acc.rank();
    }
    return v;
}

/// Direct rank of the same tuple's element of E_m(C) (test hook).
inline uint32_t m_rank_direct_single(const MatrixCode& c, uint32_t m,
                                     const std::vector<uint32_t>& tuple) {
    const auto& ctx = c.context();
    MEnv env = make_menv(ctx, m);
    const uint32_t ns = ctx->ns();
    Mat acc = Mat::zero(env.fqm, ns, ns);
    for (uint32_t i = 0; i < c.dim(); ++i) {
        if (!tuple[i]) continue;
        Mat pb = ctx->rep().phibar(c.basis()[i]).mapped(env.sub_to_qm);
        acc = acc + pb.scaled(tuple[i]);
    }
    return acc.rank();
}

/// Gray-code m-rank engine over byte-packed 2x2 matrices; requires q = 2,
/// n = 2 and |F_{q^L}| <= 256. Produces multisets identical to m_ranks_fast.
class PackedRankEngine {
public:
    PackedRankEngine(const ContextPtr& ctx, uint32_t m)
        : ctx_(ctx), env_(make_menv(ctx, m)), m_(m), opsl_(env_.fql) {
        if (ctx->q() != 2 || ctx->n() != 2) throw GuardError("packed rank engine requires q=2, n=2");
        cnt_ = residue_multiplicities(m, ctx->s());
        // lam_[t][r] = embed(g^t)^(2^r), g the generator of F_{2^m}
        lam_.assign(m_, std::vector<uint32_t>(m_));
        for (uint32_t t = 0; t < m_; ++t) {
            uint32_t g = env_.qm_to_ql.map(env_.fqm->pow(env_.fqm->generator(), t));
            for (uint32_t r = 0; r < m_; ++r) lam_[t][r] = env_.fql->frobenius(2, g, r);
        }
    }

    const PackedOps& ops() const { return opsl_; }
    const MEnv& env() const { return env_; }

    /// Packs a basis matrix, embedding entries into F_{q^L}.
    uint32_t pack_embedded(const Mat& b) const {
        return PackedOps::pack(env_.big_to_ql.map(b.at(0, 0)), env_.big_to_ql.map(b.at(0, 1)),
                               env_.big_to_ql.map(b.at(1, 0)), env_.big_to_ql.map(b.at(1, 1)));
    }

    RankMultiset multiset(const std::vector<uint32_t>& basis_l) const {
        const uint32_t k = (uint32_t)basis_l.size();
        const uint32_t bits = k * m_;
        if (bits > 26) throw GuardError("packed m-rank enumeration too large");
        // delta[b][r]: toggling bit b adds lam[b%m][r] * A_{b/m} to residue r
        std::vector<uint32_t> delta(size_t(bits) * m_);
        for (uint32_t b = 0; b < bits; ++b)
            for (uint32_t r = 0; r < m_; ++r)
                delta[size_t(b) * m_ + r] = opsl_.scalar_mul(lam_[b % m_][r], basis_l[b / m_]);

        std::vector<uint32_t> acc(m_, 0);
        std::vector<uint64_t> hist(2 * ctx_->ns() + 1, 0);
        auto value = [&]() {
            uint32_t v = 0;
            for (uint32_t r = 0; r < m_; ++r)
                if (cnt_[r]) v += cnt_[r] * opsl_.rank(acc[r]);
            return v;
        };
        ++hist[value()];
        const uint64_t total = 1ull << bits;
        for (uint64_t t = 1; t < total; ++t) {
            uint32_t b = (uint32_t)__builtin_ctzll(t);
            const uint32_t* d = &delta[size_t(b) * m_];
            for (uint32_t r = 0; r < m_; ++r) acc[r] ^= d[r];
            ++hist[value()];
        }
        RankMultiset out;
        for (uint32_t v = 0; v < hist.size(); ++v)
            if (hist[v]) out.counts[v] = hist[v];
        uint64_t zc = out.counts[0];
        if (zc > 1)
            for (auto& [r, cq] : out.counts) cq /= zc;
        return out;
    }

private:
    ContextPtr ctx_;
    MEnv env_;
    uint32_t m_;
    PackedOps opsl_;
    std::vector<uint32_t> cnt_;
    std::vector<std::vector<uint32_t>> lam_;
};

// ---------------------------------------------------------------------------

/// Registry of vector-code equivalence classes. Lookup is pure; label() does
/// check-then-insert and must be externally serialized.
class VectorClassRegistry {
public:
    struct Entry {
        VectorCode code;
        QSystemProfile profile;
    };

    VectorClassRegistry() = default;

    size_t size() const { return reps_.size(); }
    const std::vector<Entry>& entries() const { return reps_; }

    void restore(std::vector<VectorCode> codes) {
        reps_.clear();
        memo_.clear();
        for (auto& c : codes) {
            QSystemProfile p = qsystem_profile(c);
            memo_.emplace(key_str(c), (int32_t)reps_.size());
            reps_.push_back(Entry{std::move(c), std::move(p)});
        }
    }

    /// Label of the first registered representative equivalent to d, if any.
    std::optional<int32_t> lookup(const VectorCode& d) const {
        auto it = memo_.find(key_str(d));
        if (it != memo_.end()) return it->second;
        QSystemProfile p = qsystem_profile(d);
        // newest-first scan
        for (size_t i = reps_.size(); i-- > 0;) {
            if (reps_[i].profile != p) continue;
            if (vector_code_equivalent(reps_[i].code, d)) return (int32_t)i;
        }
        return std::nullopt;
    }

    /// Label of d, registering it as a new class representative if needed.
    int32_t label(const VectorCode& d) {
        auto key = key_str(d);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        int32_t lab;
        if (auto found = lookup(d)) {
            lab = *found;
        } else {
            lab = (int32_t)reps_.size();
            reps_.push_back(Entry{d, qsystem_profile(d)});
        }
        if (memo_.size() < kMemoCap) memo_.emplace(std::move(key), lab);
        return lab;
    }

private:
    static constexpr size_t kMemoCap = 1u << 20;
    std::vector<Entry> reps_;
    std::unordered_map<std::string, int32_t> memo_;

    static std::string key_str(const VectorCode& d) {
        auto k = d.key();
        std::string s;
        s.reserve(k.size() * 4);
        for (uint32_t v : k)
            for (int b = 0; b < 4; ++b) s.push_back((char)((v >> (8 * b)) & 255));
        return s;
    }
};

/// The composite invariant i(C) = (rank multiset, vector-class label).
struct InvariantKey {
    std::string ranks;
    int32_t vlabel = -1;

    std::string to_string() const { return ranks + "|v" + std::to_string(vlabel); }
    bool operator==(const InvariantKey&) const = default;
};

struct InvariantKeyHash {
    size_t operator()(const InvariantKey& k) const {
        return std::hash<std::string>()(k.ranks) * 1000003u + (size_t)(k.vlabel + 1);
    }
};

/// i(C) with the fast m-rank path (m = 2 by default, as used throughout the
/// classification).
inline InvariantKey invariant_key(const MatrixCode& c, VectorClassRegistry& registry,
                                  uint32_t m = 2) {
    InvariantKey k;
    k.ranks = m_ranks_fast(c, m).to_string();
    k.vlabel = registry.label(vector_code(c));
    return k;
}

}  // namespace rmc
