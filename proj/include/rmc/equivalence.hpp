// equivalence.hpp — complete decision procedures for matrix-code and
// vector-code equivalence, plus brute-force oracles at tiny parameters.
//
// Matrix codes: normalize C <- C*A0^-1 so it contains I; then C ~ C' iff for
// some automorphism rho and invertible B in C' there is an invertible X with
// X C^rho X^-1 = C' B^-1 (B plays the role of XY). Candidate X are recovered
// by conjugating one fixed non-scalar element M* onto elements of C' B^-1
// with equal characteristic polynomial and enumerating the intertwiner space
// { X : X M*^rho = N X }. Pairs (rho, B) are pruned by char-poly multiset
// hashes of the two spans.
//
// Vector codes: equivalence is decided on the coordinate q-systems. E = D^rho Q
// holds for some Q in GL(k, F_q) iff some F_{q^s}-linear M carries U(D)^rho
// onto U(E); the search backtracks over images of an F_{q^s}-basis contained
// in U, pruned by linear-set point weights and partial-span consistency.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "rmc/packed.hpp"
#include "rmc/vectorcode.hpp"

namespace rmc {

struct MatrixEquivWitness {
    Mat x, y;
    FieldAut rho;
};
struct VectorEquivWitness {
    Mat q;  // k x k over F_q
    FieldAut rho;
};

namespace detail {

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Basis of { X : X M = N X } for square M, N over one field, unknowns
/// row-major.
inline std::vector<Mat> intertwiner_basis(const Mat& m, const Mat& n) {
    const uint32_t nn = m.rows();
    const auto& f = m.field();
    Mat sys(f, nn * nn, nn * nn);
    for (uint32_t i = 0; i < nn; ++i)
        for (uint32_t j = 0; j < nn; ++j) {
            uint32_t eq = i * nn + j;
            for (uint32_t t = 0; t < nn; ++t) {
                sys.at(eq, i * nn + t) = f->add(sys.at(eq, i * nn + t), m.at(t, j));
                sys.at(eq, t * nn + j) = f->sub(sys.at(eq, t * nn + j), n.at(i, t));
            }
        }
    uint32_t rank = sys.echelonize(true);
    std::vector<int32_t> pivot_of_col(nn * nn, -1);
    {
        uint32_t r = 0;
        for (uint32_t c = 0; c < nn * nn && r < rank; ++c) {
            if (sys.at(r, c) != 0) {  // RREF: first nonzero in row r
                pivot_of_col[c] = (int32_t)r;
                ++r;
            }
        }
    }
    std::vector<Mat> basis;
    for (uint32_t fc = 0; fc < nn * nn; ++fc) {
        if (pivot_of_col[fc] >= 0) continue;
        Mat x(f, nn, nn);
        x.at(fc / nn, fc % nn) = 1;
        for (uint32_t c = 0; c < nn * nn; ++c) {
            int32_t r = pivot_of_col[c];
            if (r >= 0 && sys.at((uint32_t)r, fc))
                x.at(c / nn, c % nn) = f->neg(sys.at((uint32_t)r, fc));
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

// -------------------------------------------------------------------------
// representation ops for the shared matrix-equivalence core

struct GenericEquivOps {
    ContextPtr ctx;
    using Code = Mat;

    const FieldPtr& big() const { return ctx->big_field(); }
    const Field& scalar_field() const { return *ctx->big_field(); }
    uint64_t big_size() const { return ctx->big_field()->size(); }
    std::vector<FieldAut> automorphisms() const { return big()->automorphisms(); }
    Code identity() const { return Mat::identity(big(), ctx->n()); }
    Code mul(const Code& a, const Code& b) const { return a * b; }
    Code inverse(const Code& a) const { return a.inverse(); }
    Code apply_aut(const Code& a, FieldAut rho) const { return a.map_entries(rho); }
    bool is_invertible(const Code& a) const { return a.invertible(); }
    bool is_scalar(const Code& a) const {
        for (uint32_t i = 0; i < a.rows(); ++i)
            for (uint32_t j = 0; j < a.cols(); ++j) {
                if (i != j && a.at(i, j)) return false;
                if (i && a.at(i, i) != a.at(0, 0)) return false;
            }
        return true;
    }
    uint32_t scalar_of(const Code& a) const { return a.at(0, 0); }
    uint64_t charkey(const Code& a) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint32_t c : charpoly_coeffs(a)) h = mix64(h ^ c);
        return h;
    }
    std::vector<Code> intertwiners(const Code& m, const Code& n) const {
        return intertwiner_basis(m, n);
    }
    Code scaled(uint32_t lambda_big, const Code& a) const { return a.scaled(lambda_big); }
    Code add(const Code& a, const Code& b) const { return a + b; }

    std::vector<Code> span(const std::vector<Code>& basis) const {
        return MatrixCode(ctx, basis).span();
    }
    struct Target {
        std::optional<MatrixCode> code;
        bool contains(const Code& m) const { return code->contains(m); }
    };
    Target make_target(const std::vector<Code>& basis) const {
        Target t;
        t.code.emplace(ctx, basis);
        return t;
    }
};

/// p = 2, n = 2, q = 2, |F_{q^s}| <= 256.
struct PackedEquivOps {
    const PackedOps* ops;
    uint32_t sbits;

    using Code = uint32_t;
    const Field& scalar_field() const { return *ops->field(); }
    uint64_t big_size() const { return ops->field()->size(); }
    std::vector<FieldAut> automorphisms() const { return ops->field()->automorphisms(); }
    Code identity() const { return PackedOps::pack(1, 0, 0, 1); }
    Code mul(Code a, Code b) const { return ops->matmul(a, b); }
    Code inverse(Code a) const { return ops->inverse(a); }
    Code apply_aut(Code a, FieldAut rho) const { return ops->map_entries(a, rho.j); }
    bool is_invertible(Code a) const { return ops->det(a) != 0; }
    bool is_scalar(Code a) const { return (a & 0x00ffff00u) == 0 && (a & 255) == (a >> 24); }
    uint32_t scalar_of(Code a) const { return a & 255; }
    uint64_t charkey(Code a) const { return ops->charpair(a); }
    std::vector<Code> intertwiners(Code m, Code n) const {
        auto basis = intertwiner_basis(ops->to_mat(m), ops->to_mat(n));
        std::vector<Code> out;
        out.reserve(basis.size());
        for (const auto& b : basis) out.push_back(ops->from_mat(b));
        return out;
    }
    Code scaled(uint32_t lambda_big, Code a) const { return ops->scalar_mul(lambda_big, a); }
    Code add(Code a, Code b) const { return a ^ b; }

    std::vector<Code> span(const std::vector<Code>& basis) const { return ops->span(basis); }
    struct Target {
        std::vector<uint64_t> rref;
        uint32_t sbits = 0;
        bool contains(Code m) const { return bitrows_member(rref, packed_expand_bits(m, sbits)); }
    };
    Target make_target(const std::vector<Code>& basis) const {
        std::vector<uint64_t> rows;
        rows.reserve(basis.size());
        for (Code b : basis) rows.push_back(packed_expand_bits(b, sbits));
        if (bitrows_rref(rows) != basis.size()) throw DimensionError("dependent basis");
        return Target{std::move(rows), sbits};
    }
};

template <class Code>
struct CoreWitness {
    Code x;
    Code b;
    FieldAut rho;
};

/// Per-target caches, reusable across many tests against the same C'.
template <class O>
struct PreparedTarget {
    std::vector<typename O::Code> basis;
    std::vector<typename O::Code> span;  // span[0] = 0, canonical order
    std::vector<size_t> invertible;      // indices into span
    std::vector<uint64_t> hash_per_b;
    typename O::Target membership;

    static PreparedTarget build(const O& o, const std::vector<typename O::Code>& basis) {
        PreparedTarget t;
        t.basis = basis;
        t.span = o.span(basis);
        t.membership = o.make_target(basis);
        for (size_t i = 1; i < t.span.size(); ++i)
            if (o.is_invertible(t.span[i])) t.invertible.push_back(i);
        t.hash_per_b.reserve(t.invertible.size());
        for (size_t bi : t.invertible) {
            auto binv = o.inverse(t.span[bi]);
            uint64_t h = 0;
            for (size_t i = 1; i < t.span.size(); ++i)
                h += mix64(o.charkey(o.mul(t.span[i], binv)));
            t.hash_per_b.push_back(h);
        }
        return t;
    }
};

/// Complete search. basis1 must already be normalized so that its span
/// contains the identity.
template <class O>
std::optional<CoreWitness<typename O::Code>> equiv_core(const O& o,
                                                        const std::vector<typename O::Code>& basis1,
                                                        const PreparedTarget<O>& target) {
    using Code = typename O::Code;
    const auto auts = o.automorphisms();
    auto span1 = o.span(basis1);
    if (span1.size() != target.span.size()) return std::nullopt;
    size_t inv1 = 0;
    for (size_t i = 1; i < span1.size(); ++i)
        if (o.is_invertible(span1[i])) ++inv1;
    if (inv1 != target.invertible.size()) return std::nullopt;

    // scalar branch: span1 inside F_{q^s} * I
    bool all_scalar = true;
    for (const auto& b : basis1)
        if (!o.is_scalar(b)) { all_scalar = false; break; }
    if (all_scalar) {
        std::vector<uint32_t> v;
        v.reserve(span1.size());
        for (const auto& x : span1) v.push_back(o.scalar_of(x));
        std::sort(v.begin(), v.end());
        for (FieldAut rho : auts) {
            std::vector<uint32_t> vr;
            vr.reserve(v.size());
            const Field& f = o.scalar_field();
            for (uint32_t lam : v) vr.push_back(f.apply(rho, lam));
            std::sort(vr.begin(), vr.end());
            for (size_t t = 0; t < target.invertible.size(); ++t) {
                Code b = target.span[target.invertible[t]];
                Code binv = o.inverse(b);
                std::vector<uint32_t> w;
                w.reserve(target.span.size());
                bool ok = true;
                for (const auto& x : target.span) {
                    Code n = o.mul(x, binv);
                    if (!o.is_scalar(n)) { ok = false; break; }
                    w.push_back(o.scalar_of(n));
                }
                if (!ok) continue;
                std::sort(w.begin(), w.end());
                if (w == vr) return CoreWitness<Code>{o.identity(), b, rho};
            }
        }
        return std::nullopt;
    }

    // pick the first non-scalar basis element as the conjugation anchor
    size_t anchor = 0;
    while (o.is_scalar(basis1[anchor])) ++anchor;

    for (FieldAut rho : auts) {
        uint64_t hc = 0;
        std::vector<Code> basis_rho;
        basis_rho.reserve(basis1.size());
        for (const auto& b : basis1) basis_rho.push_back(o.apply_aut(b, rho));
        for (size_t i = 1; i < span1.size(); ++i)
            hc += mix64(o.charkey(o.apply_aut(span1[i], rho)));

        Code mstar = basis_rho[anchor];
        uint64_t cpstar = o.charkey(mstar);

        for (size_t t = 0; t < target.invertible.size(); ++t) {
            if (target.hash_per_b[t] != hc) continue;
            Code b = target.span[target.invertible[t]];
            Code binv = o.inverse(b);
            for (size_t xi = 1; xi < target.span.size(); ++xi) {
                Code n = o.mul(target.span[xi], binv);
                if (o.charkey(n) != cpstar) continue;
                auto iw = o.intertwiners(mstar, n);
                if (iw.empty()) continue;
                // enumerate the intertwiner space over the big field
                {
                    uint64_t qs = 1;
                    for (size_t i = 0; i < iw.size(); ++i) {
                        qs *= o.big_size();
                        if (qs > (1ull << 20)) throw GuardError("intertwiner space too large");
                    }
                }
                std::vector<uint32_t> tuple(iw.size(), 0);
                while (true) {
                    // advance odometer first so the all-zero X is skipped
                    size_t pos = 0;
                    while (pos < tuple.size()) {
                        if (++tuple[pos] < o.big_size()) break;
                        tuple[pos] = 0;
                        ++pos;
                    }
                    if (pos == tuple.size()) break;
                    Code x = o.scaled(tuple[0], iw[0]);
                    for (size_t i = 1; i < iw.size(); ++i)
                        if (tuple[i]) x = o.add(x, o.scaled(tuple[i], iw[i]));
                    if (!o.is_invertible(x)) continue;
                    Code xinv = o.inverse(x);
                    bool ok = true;
                    for (const auto& br : basis_rho) {
                        Code img = o.mul(o.mul(x, br), xinv);
                        if (!target.membership.contains(o.mul(img, b))) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) return CoreWitness<Code>{x, b, rho};
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Enumerates GL(n, F) as a list of matrices (guarded).
inline std::vector<Mat> general_linear_group(const FieldPtr& f, uint32_t n, uint64_t guard = 1u << 22) {
    uint64_t total = 1;
    for (uint32_t i = 0; i < n * n; ++i) {
        total *= f->size();
        if (total > guard) throw GuardError("GL enumeration too large");
    }
    std::vector<Mat> out;
    for (uint64_t code = 0; code < total; ++code) {
        Mat m(f, n, n);
        uint64_t t = code;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j) {
                m.at(i, j) = (uint32_t)(t % f->size());
                t /= f->size();
            }
        if (m.invertible()) out.push_back(std::move(m));
    }
    return out;
}

inline uint64_t gl_order(uint64_t q, uint32_t n) {
    uint64_t qn = 1;
    for (uint32_t i = 0; i < n; ++i) qn *= q;
    uint64_t ord = 1, qi = 1;
    for (uint32_t i = 0; i < n; ++i) {
        ord *= (qn - qi);
        qi *= q;
    }
    return ord;
}

/// Exhaustive ground truth over (X, Y, rho); guarded to tiny parameters.
inline bool brute_force_matrix_equiv(const MatrixCode& c, const MatrixCode& cp,
                                     MatrixEquivWitness* witness_out = nullptr) {
    const auto& ctx = c.context();
    if (!ctx->same(*cp.context())) throw DimensionError("parameter mismatch");
    if (c.dim() != cp.dim()) throw DimensionError("dimension mismatch");
    const auto& big = ctx->big_field();
    uint64_t glo = gl_order(big->size(), ctx->n());
    double work = (double)glo * (double)glo * (double)big->degree();
    if (work > 1e9) throw GuardError("brute-force guard exceeded (|GL|^2 * |Aut| > 1e9)");
    if (c.dim() == 0) {
        if (witness_out)
            *witness_out = {Mat::identity(big, ctx->n()), Mat::identity(big, ctx->n()), FieldAut{0}};
        return true;
    }
    auto gl = general_linear_group(big, ctx->n());
    for (FieldAut rho : big->automorphisms()) {
        std::vector<Mat> brho;
        brho.reserve(c.dim());
        for (const auto& b : c.basis()) brho.push_back(b.map_entries(rho));
        for (const auto& x : gl) {
            std::vector<Mat> xb;
            xb.reserve(c.dim());
            for (const auto& b : brho) xb.push_back(x * b);
            for (const auto& y : gl) {
                // quick filter on the first generator image
                if (!cp.contains(xb[0] * y)) continue;
                bool ok = true;
                for (uint32_t i = 1; i < c.dim(); ++i)
                    if (!cp.contains(xb[i] * y)) { ok = false; break; }
                if (!ok) continue;
                if (witness_out) *witness_out = {x, y, rho};
                return true;
            }
        }
    }
    return false;
}

/// Complete decider; returns a verified witness if the codes are equivalent.
inline std::optional<MatrixEquivWitness> matrix_code_equivalent(const MatrixCode& c,
                                                                const MatrixCode& cp) {
    const auto& ctx = c.context();
    if (!ctx->same(*cp.context())) throw DimensionError("parameter mismatch");
    if (c.dim() != cp.dim()) throw DimensionError("dimension mismatch");
    const auto& big = ctx->big_field();
    if (c.dim() == 0)
        return MatrixEquivWitness{Mat::identity(big, ctx->n()), Mat::identity(big, ctx->n()),
                                  FieldAut{0}};

    // locate an invertible element to normalize by
    auto span1 = c.span();
    const Mat* a0 = nullptr;
    for (size_t i = 1; i < span1.size(); ++i)
        if (span1[i].invertible()) { a0 = &span1[i]; break; }
    if (!a0) {
        // no invertible elements at all: not a spread-set-like code; the
        // reduction does not apply, fall back to the exhaustive oracle
        MatrixEquivWitness w;
        if (brute_force_matrix_equiv(c, cp, &w)) return w;
        return std::nullopt;
    }

    auto verify_and_wrap = [&](const Mat& x, const Mat& b, FieldAut rho,
                               const Mat& a0m) -> std::optional<MatrixEquivWitness> {
        Mat y = a0m.map_entries(rho).inverse() * x.inverse() * b;
        std::vector<Mat> timg;
        timg.reserve(c.dim());
        for (const auto& bm : c.basis()) timg.push_back(x * bm.map_entries(rho) * y);
        MatrixCode transformed(ctx, timg);
        if (!transformed.same_span(cp)) throw Error("internal: equivalence witness failed to verify");
        return MatrixEquivWitness{x, y, rho};
    };

    Mat a0inv = a0->inverse();
    const bool packed_ok = big->characteristic() == 2 && ctx->n() == 2 && big->size() <= 256 &&
                           ctx->q() == 2;
    if (packed_ok) {
        PackedOps ops(big);
        detail::PackedEquivOps o{&ops, big->degree()};
        std::vector<uint32_t> b1;
        b1.reserve(c.dim());
        for (const auto& b : c.basis()) b1.push_back(ops.matmul(ops.from_mat(b), ops.from_mat(a0inv)));
        std::vector<uint32_t> b2;
        b2.reserve(cp.dim());
        for (const auto& b : cp.basis()) b2.push_back(ops.from_mat(b));
        auto target = detail::PreparedTarget<detail::PackedEquivOps>::build(o, b2);
        auto w = detail::equiv_core(o, b1, target);
        if (!w) return std::nullopt;
        return verify_and_wrap(ops.to_mat(w->x), ops.to_mat(w->b), w->rho, *a0);
    }
    detail::GenericEquivOps o{ctx};
    std::vector<Mat> b1;
    b1.reserve(c.dim());
    for (const auto& b : c.basis()) b1.push_back(b * a0inv);
    auto target = detail::PreparedTarget<detail::GenericEquivOps>::build(o, cp.basis());
    auto w = detail::equiv_core(o, b1, target);
    if (!w) return std::nullopt;
    return verify_and_wrap(w->x, w->b, w->rho, *a0);
}

// ---------------------------------------------------------------------------
// vector-code equivalence via q-systems

namespace detail {

/// Coordinate q-system of a vector code over a characteristic-2 field of
/// size <= 256, dimension r <= 8: the F_q-span of the generator columns,
/// packed one byte per coordinate.
struct QSys {
    uint32_t r = 0;
    std::vector<uint64_t> elems;  // sorted, includes 0
    std::unordered_set<uint64_t> set;
    std::unordered_map<uint64_t, uint32_t> point_weight;  // normalized key -> weight
    std::vector<uint64_t> columns;                        // generator columns, packed

    static uint64_t pack(const std::vector<uint32_t>& v) {
        uint64_t r = 0;
        for (size_t i = 0; i < v.size(); ++i) r |= (uint64_t)(v[i] & 255) << (8 * i);
        return r;
    }

    static QSys build(const VectorCode& d) {
        const auto& f = d.field();
        if (f->characteristic() != 2 || f->size() > 256 || d.dim() > 8 || d.q() != 2)
            throw GuardError("q-system machinery requires q=2, |F| <= 256, dim <= 8");
        QSys u;
        u.r = d.dim();
        u.columns.resize(d.length());
        for (uint32_t j = 0; j < d.length(); ++j) {
            std::vector<uint32_t> col(u.r);
            for (uint32_t i = 0; i < u.r; ++i) col[i] = d.gen_at(i, j);
            u.columns[j] = pack(col);
        }
        // F_2-span of the columns
        u.set.insert(0);
        for (uint64_t c : u.columns) {
            if (u.set.count(c)) continue;
            std::vector<uint64_t> cur(u.set.begin(), u.set.end());
            for (uint64_t x : cur) u.set.insert(x ^ c);
        }
        u.elems.assign(u.set.begin(), u.set.end());
        std::sort(u.elems.begin(), u.elems.end());
        u.compute_weights(*f);
        return u;
    }

    uint64_t normalize(const Field& f, uint64_t v) const {
        for (uint32_t i = 0; i < r; ++i) {
            uint32_t b = (uint32_t)((v >> (8 * i)) & 255);
            if (b) {
                uint32_t lam = f.inv(b);
                uint64_t out = 0;
                for (uint32_t t = 0; t < r; ++t)
                    out |= (uint64_t)f.mul(lam, (uint32_t)((v >> (8 * t)) & 255)) << (8 * t);
                return out;
            }
        }
        return 0;
    }

    void compute_weights(const Field& f) {
        std::unordered_map<uint64_t, uint32_t> cnt;
        for (uint64_t v : elems)
            if (v) ++cnt[normalize(f, v)];
        for (auto& [k, c] : cnt) {
            uint32_t w = 0;
            while ((1u << w) - 1 < c) ++w;
            if ((1u << w) - 1 != c) throw Error("internal: point fiber size not 2^w - 1");
            point_weight[k] = w;
        }
    }

    QSystemProfile profile() const {
        std::unordered_map<uint32_t, uint64_t> wc;
        for (auto& [k, w] : point_weight) ++wc[w];
        QSystemProfile p;
        uint64_t n = elems.size();
        p.dim_fq = 0;
        while ((1ull << p.dim_fq) < n) ++p.dim_fq;
        p.weights.assign(wc.begin(), wc.end());
        std::sort(p.weights.begin(), p.weights.end());
        return p;
    }
};

/// Incremental F_{q^s}-span solver over byte-packed vectors with coefficient
/// tracking.
struct ByteSpanSolver {
    const Field* f;
    uint32_t r;
    struct Row {
        uint64_t v;
        uint32_t lead;                  // byte index of leading 1
        std::vector<uint32_t> coeffs;   // combination of the added generators
    };
    std::vector<Row> rows;
    uint32_t added = 0;

    uint32_t byte(uint64_t v, uint32_t i) const { return (uint32_t)((v >> (8 * i)) & 255); }
    uint64_t sub_scaled(uint64_t v, uint32_t lam, uint64_t w) const {
        // v - lam*w, char 2
        uint64_t out = 0;
        for (uint32_t t = 0; t < r; ++t)
            out |= (uint64_t)(byte(v, t) ^ f->mul(lam, byte(w, t))) << (8 * t);
        return out;
    }

    /// Adds a generator; returns false if dependent (not added).
    bool add(uint64_t v) {
        std::vector<uint32_t> c(added + 1, 0);
        c[added] = 1;
        for (const auto& row : rows) {
            uint32_t lam = byte(v, row.lead);
            if (!lam) continue;
            v = sub_scaled(v, lam, row.v);
            for (size_t i = 0; i < row.coeffs.size(); ++i)
                c[i] = f->sub(c[i], f->mul(lam, row.coeffs[i]));
        }
        ++added;
        for (auto& row : rows) row.coeffs.resize(added, 0);
        if (!v) return false;
        uint32_t lead = 0;
        while (!byte(v, lead)) ++lead;
        uint32_t ip = f->inv(byte(v, lead));
        uint64_t nv = 0;
        for (uint32_t t = 0; t < r; ++t) nv |= (uint64_t)f->mul(ip, byte(v, t)) << (8 * t);
        for (auto& cc : c) cc = f->mul(ip, cc);
        c.resize(added, 0);
        rows.push_back(Row{nv, lead, std::move(c)});
        return true;
    }

    /// Coefficients over the added generators if v lies in their span.
    std::optional<std::vector<uint32_t>> solve(uint64_t v) const {
        std::vector<uint32_t> c(added, 0);
        for (const auto& row : rows) {
            uint32_t lam = byte(v, row.lead);
            if (!lam) continue;
            v = sub_scaled(v, lam, row.v);
            for (size_t i = 0; i < row.coeffs.size(); ++i)
                c[i] = f->add(c[i], f->mul(lam, row.coeffs[i]));
        }
        if (v) return std::nullopt;
        return c;
    }
    bool contains(uint64_t v) const { return solve(v).has_value(); }
};

}  // namespace detail

inline QSystemProfile qsystem_profile(const VectorCode& d) {
    return detail::QSys::build(d).profile();
}

/// Complete decider for vector rank-metric code equivalence. Returns a
/// verified witness (Q over F_q, rho) with E = { v^rho Q : v in D }.
inline std::optional<VectorEquivWitness> vector_code_equivalent(const VectorCode& d,
                                                                const VectorCode& e) {
    const auto& f = d.field();
    if (!f->same_field(*e.field()) || d.q() != e.q()) throw DimensionError("field mismatch");
    if (d.length() != e.length()) throw DimensionError("length mismatch");
    const uint32_t k = d.length();
    FieldPtr sub = Field::make(f->characteristic(), [&] {
        uint64_t q = d.q();
        uint32_t eDeg = 0;
        while (q > 1) { q /= f->characteristic(); ++eDeg; }
        return eDeg;
    }());
    if (d.dim() != e.dim()) return std::nullopt;
    if (d.dim() == 0)
        return VectorEquivWitness{Mat::identity(sub, k), FieldAut{0}};

    const bool packable = f->characteristic() == 2 && f->size() <= 256 && d.dim() <= 8 &&
                          d.q() == 2 && (uint64_t)d.dim() * f->degree() <= 64;
    if (!packable) {
        // tiny-parameter fallback: exhaust Q over GL(k, F_q)
        auto gl = general_linear_group(sub, k);
        Embedding emb = Embedding::find(sub, f);
        for (FieldAut rho : f->automorphisms()) {
            std::vector<std::vector<uint32_t>> rows(d.dim(), std::vector<uint32_t>(k));
            for (uint32_t i = 0; i < d.dim(); ++i)
                for (uint32_t j = 0; j < k; ++j) rows[i][j] = f->apply(rho, d.gen_at(i, j));
            for (const auto& q : gl) {
                std::vector<std::vector<uint32_t>> tr(d.dim(), std::vector<uint32_t>(k, 0));
                for (uint32_t i = 0; i < d.dim(); ++i)
                    for (uint32_t j = 0; j < k; ++j) {
                        uint32_t acc = 0;
                        for (uint32_t t = 0; t < k; ++t)
                            if (q.at(t, j))
                                acc = f->add(acc, f->mul(rows[i][t], emb.map(q.at(t, j))));
                        tr[i][j] = acc;
                    }
                if (VectorCode(f, d.q(), k, tr) == e) return VectorEquivWitness{q, rho};
            }
        }
        return std::nullopt;
    }

    auto ud = detail::QSys::build(d);
    auto ue = detail::QSys::build(e);
    if (ud.elems.size() != ue.elems.size()) return std::nullopt;
    if (ud.profile() != ue.profile()) return std::nullopt;

    const uint32_t r = d.dim();
    const Field& ff = *f;

    // verification helper: D^rho Q == E exactly
    auto verify = [&](const Mat& q, FieldAut rho) {
        Mat g(f, r, k);
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < k; ++j) g.at(i, j) = ff.apply(rho, d.gen_at(i, j));
        Mat qbig(f, k, k);
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < k; ++j) qbig.at(i, j) = q.at(i, j);  // F_2 entries
        Mat gq = g * qbig;
        std::vector<std::vector<uint32_t>> rows(r, std::vector<uint32_t>(k));
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < k; ++j) rows[i][j] = gq.at(i, j);
        VectorCode dt(f, d.q(), k, rows);
        return dt == e;
    };

    for (FieldAut rho : f->automorphisms()) {
        // image of U(D) under entrywise rho
        std::vector<uint64_t> urho;
        urho.reserve(ud.elems.size());
        for (uint64_t v : ud.elems) {
            uint64_t out = 0;
            for (uint32_t t = 0; t < r; ++t)
                out |= (uint64_t)ff.apply(rho, (uint32_t)((v >> (8 * t)) & 255)) << (8 * t);
            urho.push_back(out);
        }
        std::sort(urho.begin(), urho.end());
        // point weights on the rho side
        std::unordered_map<uint64_t, uint32_t> wrho;
        {
            std::unordered_map<uint64_t, uint32_t> cnt;
            for (uint64_t v : urho)
                if (v) ++cnt[ud.normalize(ff, v)];
            for (auto& [key, c] : cnt) {
                uint32_t w = 0;
                while ((1u << w) - 1 < c) ++w;
                wrho[key] = w;
            }
        }

        // backtracking over images of an F_{q^s}-basis contained in U^rho
        std::vector<uint64_t> chosen_u, chosen_w;
        detail::ByteSpanSolver su{&ff, r}, sw{&ff, r};

        std::function<std::optional<VectorEquivWitness>()> rec =
            [&]() -> std::optional<VectorEquivWitness> {
            if (chosen_u.size() == r) {
                // full map fixed; all of U^rho verified by construction
                // build M with columns mapping: M * u_i = w_i
                Mat um(f, r, r), wm(f, r, r);
                for (uint32_t j = 0; j < r; ++j)
                    for (uint32_t i = 0; i < r; ++i) {
                        um.at(i, j) = (uint32_t)((chosen_u[j] >> (8 * i)) & 255);
                        wm.at(i, j) = (uint32_t)((chosen_w[j] >> (8 * i)) & 255);
                    }
                Mat m = wm * um.inverse();
                // build Q over F_2 from the two generator frames
                Mat grho(f, r, k);
                for (uint32_t i = 0; i < r; ++i)
                    for (uint32_t j = 0; j < k; ++j) grho.at(i, j) = ff.apply(rho, d.gen_at(i, j));
                Mat p1 = m * grho;  // r x k, columns = images of D^rho frame
                // F_2 expansions as bit rows: column j -> bits of r*s coords
                const uint32_t sdeg = f->degree();
                auto colbits = [&](const Mat& g, uint32_t j) {
                    uint64_t bits = 0;
                    for (uint32_t i = 0; i < r; ++i) {
                        uint32_t code = g.at(i, j);
                        bits |= (uint64_t)code << (i * sdeg);
                    }
                    return bits;
                };
                // solve P1 * x = col_j(Gamma_E) over F_2 for each j, kernel-adjusted
                // build RREF of P1 columns as a system: rows = k vectors of rs bits
                std::vector<uint64_t> p1cols(k), p2cols(k);
                for (uint32_t j = 0; j < k; ++j) p1cols[j] = colbits(p1, j);
                Mat gE(f, r, k);
                for (uint32_t i = 0; i < r; ++i)
                    for (uint32_t j = 0; j < k; ++j) gE.at(i, j) = e.gen_at(i, j);
                for (uint32_t j = 0; j < k; ++j) p2cols[j] = colbits(gE, j);

                // Gaussian elimination on p1cols as k generators over F_2 with
                // coefficient tracking (columns of Q are F_2 coefficient vectors)
                struct BitRow {
                    uint64_t v;
                    uint64_t coeff;  // subset of generators (k <= 64)
                };
                std::vector<BitRow> rowsb;
                std::vector<uint64_t> kernel1;  // coeff masks with zero value
                for (uint32_t j = 0; j < k; ++j) {
                    uint64_t v = p1cols[j], cf = 1ull << j;
                    for (auto& rb : rowsb) {
                        uint64_t lead = 1ull << (63 - __builtin_clzll(rb.v));
                        if (v & lead) {
                            v ^= rb.v;
                            cf ^= rb.coeff;
                        }
                    }
                    if (v)
                        rowsb.push_back(BitRow{v, cf});
                    else
                        kernel1.push_back(cf);
                }
                auto solve1 = [&](uint64_t target) -> std::optional<uint64_t> {
                    uint64_t v = target, cf = 0;
                    for (auto& rb : rowsb) {
                        uint64_t lead = 1ull << (63 - __builtin_clzll(rb.v));
                        if (v & lead) {
                            v ^= rb.v;
                            cf ^= rb.coeff;
                        }
                    }
                    if (v) return std::nullopt;
                    return cf;
                };
                // kernel of P2
                std::vector<uint64_t> kernel2;
                std::vector<uint32_t> pivot2;
                {
                    std::vector<BitRow> rows2;
                    for (uint32_t j = 0; j < k; ++j) {
                        uint64_t v = p2cols[j], cf = 1ull << j;
                        for (auto& rb : rows2) {
                            uint64_t lead = 1ull << (63 - __builtin_clzll(rb.v));
                            if (v & lead) {
                                v ^= rb.v;
                                cf ^= rb.coeff;
                            }
                        }
                        if (v) {
                            rows2.push_back(BitRow{v, cf});
                            pivot2.push_back(j);
                        } else
                            kernel2.push_back(cf);
                    }
                }
                if (kernel1.size() != kernel2.size())
                    throw Error("internal: q-system kernels of unequal dimension");
                // assemble Q on the basis {e_j : j pivot} + kernel2
                Mat qmat(sub, k, k);
                Mat smat(sub, k, k);
                uint32_t colidx = 0;
                std::vector<uint64_t> qcols;
                for (uint32_t j : pivot2) {
                    auto x = solve1(p2cols[j]);
                    if (!x) throw Error("internal: inconsistent q-system transport");
                    qcols.push_back(*x);
                    for (uint32_t i = 0; i < k; ++i) smat.at(i, colidx) = (j == i) ? 1 : 0;
                    ++colidx;
                }
                for (size_t t = 0; t < kernel2.size(); ++t) {
                    qcols.push_back(kernel1[t]);
                    for (uint32_t i = 0; i < k; ++i)
                        smat.at(i, colidx) = (uint32_t)((kernel2[t] >> i) & 1);
                    ++colidx;
                }
                Mat qb(sub, k, k);
                for (uint32_t cjs = 0; cjs < k; ++cjs)
                    for (uint32_t i = 0; i < k; ++i) qb.at(i, cjs) = (uint32_t)((qcols[cjs] >> i) & 1);
                Mat q = qb * smat.inverse();
                if (!verify(q, rho)) throw Error("internal: vector witness failed to verify");
                return VectorEquivWitness{q, rho};
            }

            // pick next basis vector from U^rho outside the current span
            uint64_t upick = 0;
            bool found = false;
            for (uint64_t v : urho)
                if (v && !su.contains(v)) {
                    upick = v;
                    found = true;
                    break;
                }
            if (!found) throw Error("internal: q-system does not span");
            uint32_t wneed = 0;
            {
                auto it = wrho.find(ud.normalize(ff, upick));
                wneed = it->second;
            }
            for (uint64_t w : ue.elems) {
                if (!w || sw.contains(w)) continue;
                auto jt = ue.point_weight.find(ue.normalize(ff, w));
                if (jt == ue.point_weight.end() || jt->second != wneed) continue;
                // tentative extension
                detail::ByteSpanSolver su2 = su, sw2 = sw;
                su2.add(upick);
                sw2.add(w);
                chosen_u.push_back(upick);
                chosen_w.push_back(w);
                // consistency: counts and containment of U^rho within the span
                uint64_t cu = 0, cw = 0;
                bool ok = true;
                for (uint64_t v : urho) {
                    auto sol = su2.solve(v);
                    if (!sol) continue;
                    ++cu;
                    uint64_t img = 0;
                    for (uint32_t i = 0; i < chosen_w.size(); ++i) {
                        uint32_t lam = (*sol)[i];
                        if (!lam) continue;
                        for (uint32_t t = 0; t < r; ++t) {
                            uint32_t bb = ff.mul(lam, (uint32_t)((chosen_w[i] >> (8 * t)) & 255));
                            img ^= (uint64_t)bb << (8 * t);
                        }
                    }
                    if (!ue.set.count(img)) { ok = false; break; }
                }
                if (ok)
                    for (uint64_t v : ue.elems)
                        if (sw2.contains(v)) ++cw;
                if (ok && cu == cw) {
                    std::swap(su, su2);
                    std::swap(sw, sw2);
                    auto res = rec();
                    if (res) return res;
                    std::swap(su, su2);
                    std::swap(sw, sw2);
                }
                chosen_u.pop_back();
                chosen_w.pop_back();
            }
            return std::nullopt;
        };
        auto res = rec();
        if (res) return res;
    }
    return std::nullopt;
}

}  // namespace rmc
