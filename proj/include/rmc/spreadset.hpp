// spreadset.hpp — F_q-subspaces of M_n(F_{q^s}), semifield spread sets,
// canonical bases, seed sets, and construction from a presemifield product.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rmc/embed.hpp"

namespace rmc {

/// Shared immutable context for codes in M_n(F_{q^s}) over F_q.
class CodeContext {
public:
    CodeContext(FieldPtr big, FieldPtr sub, uint32_t n)
        : big_(big), sub_(sub), rep_(big, sub), n_(n), s_(rep_.ext_degree()) {
        if (n_ == 0) throw DimensionError("n must be positive");
    }

    static std::shared_ptr<const CodeContext> make(uint64_t q, uint32_t n, uint32_t s) {
        // q = p^e
        uint64_t t = q;
        uint32_t p = 2;
        for (uint32_t c = 2; c <= q; ++c)
            if (q % c == 0) { p = c; break; }
        uint32_t e = 0;
        while (t % p == 0) { t /= p; ++e; }
        if (t != 1) throw FieldError("q must be a prime power");
        FieldPtr sub = Field::make(p, e);
        FieldPtr big = Field::make(p, e * s);
        return std::make_shared<CodeContext>(big, sub, n);
    }

    const FieldPtr& big_field() const { return big_; }
    const FieldPtr& sub_field() const { return sub_; }
    const RegularRep& rep() const { return rep_; }
    uint64_t q() const { return sub_->size(); }
    uint32_t n() const { return n_; }
    uint32_t s() const { return s_; }
    uint32_t ns() const { return n_ * s_; }

    bool same(const CodeContext& o) const {
        return big_->same_field(*o.big_) && sub_->same_field(*o.sub_) && n_ == o.n_;
    }

    /// theta^i e_j (0-based i in [0,s), j in [1,n]) — the prescribed first row
    /// of seed set with index k = i + (j-1)s + 1.
    std::vector<uint32_t> prescribed_first_row(uint32_t k1) const {
        uint32_t k = k1 - 1;
        uint32_t i = k % s_, j = k / s_;
        std::vector<uint32_t> row(n_, 0);
        row[j] = big_->pow(big_->generator(), i);
        return row;
    }

private:
    FieldPtr big_, sub_;
    RegularRep rep_;
    uint32_t n_, s_;
};
using ContextPtr = std::shared_ptr<const CodeContext>;

/// An F_q-subspace of M_n(F_{q^s}) given by an independent basis. Equality of
/// codes is span equality, decided through the reduced echelon form of the
/// F_q-vectorised basis.
class MatrixCode {
public:
    MatrixCode(ContextPtr ctx, std::vector<Mat> basis)
        : ctx_(std::move(ctx)), basis_(std::move(basis)) {
        for (const auto& m : basis_) {
            if (!m.field()->same_field(*ctx_->big_field()))
                throw FieldError("basis entry over wrong field");
            if (m.rows() != ctx_->n() || m.cols() != ctx_->n())
                throw DimensionError("basis entry has wrong shape");
        }
        build_echelon();
    }

    const ContextPtr& context() const { return ctx_; }
    uint32_t dim() const { return (uint32_t)basis_.size(); }
    const std::vector<Mat>& basis() const { return basis_; }
    const Mat& echelon() const { return echelon_; }

    /// F_q-expansion of a matrix: vec (column-major), each entry decomposed
    /// in the power basis; length n^2 * s over F_q.
    std::vector<uint32_t> expand(const Mat& m) const {
        const auto& rep = ctx_->rep();
        const uint32_t n = ctx_->n(), s = ctx_->s();
        std::vector<uint32_t> out(size_t(n) * n * s);
        Mat v = m.vec();
        for (uint32_t t = 0; t < n * n; ++t) {
            const auto& c = rep.coords(v.at(t, 0));
            for (uint32_t i = 0; i < s; ++i) out[size_t(t) * s + i] = c[i];
        }
        return out;
    }
    /// Inverse of expand.
    Mat contract(const std::vector<uint32_t>& row) const {
        const auto& rep = ctx_->rep();
        const uint32_t n = ctx_->n(), s = ctx_->s();
        Mat m(ctx_->big_field(), n, n);
        for (uint32_t t = 0; t < n * n; ++t) {
            std::vector<uint32_t> c(row.begin() + size_t(t) * s, row.begin() + size_t(t + 1) * s);
            // vec position t = col*n + row
            m.at(t % n, t / n) = rep.compose(c);
        }
        return m;
    }

    /// All q^k span elements, zero first, in odometer order over the basis.
    std::vector<Mat> span() const {
        std::vector<Mat> out;
        uint64_t total = 1;
        for (uint32_t i = 0; i < dim(); ++i) total *= ctx_->q();
        out.reserve(total);
        std::vector<uint32_t> tuple(dim(), 0);
        const auto& emb = ctx_->rep().embedding();
        while (true) {
            Mat m = Mat::zero(ctx_->big_field(), ctx_->n(), ctx_->n());
            for (uint32_t i = 0; i < dim(); ++i)
                if (tuple[i]) m = m + basis_[i].scaled(emb.map(tuple[i]));
            out.push_back(std::move(m));
            uint32_t pos = 0;
            while (pos < dim()) {
                if (++tuple[pos] < ctx_->q()) break;
                tuple[pos] = 0;
                ++pos;
            }
            if (pos == dim()) break;
        }
        return out;
    }

    bool contains(const Mat& m) const {
        std::vector<uint32_t> row = expand(m);
        reduce_against_echelon(row);
        for (uint32_t v : row)
            if (v) return false;
        return true;
    }
    bool same_span(const MatrixCode& o) const {
        return dim() == o.dim() && echelon_ == o.echelon_;
    }

    /// Span extended by one generator (must be independent).
    MatrixCode extended(const Mat& a) const {
        auto b = basis_;
        b.push_back(a);
        return MatrixCode(ctx_, std::move(b));
    }

    /// Reduced-echelon basis of the span — the canonical form for partial codes.
    MatrixCode echelon_basis() const {
        std::vector<Mat> b;
        const uint32_t cols = ctx_->n() * ctx_->n() * ctx_->s();
        for (uint32_t r = 0; r < dim(); ++r) {
            std::vector<uint32_t> row(cols);
            for (uint32_t c = 0; c < cols; ++c) row[c] = echelon_.at(r, c);
            b.push_back(contract(row));
        }
        return MatrixCode(ctx_, std::move(b));
    }

private:
    ContextPtr ctx_;
    std::vector<Mat> basis_;
    Mat echelon_;

    void build_echelon() {
        const uint32_t cols = ctx_->n() * ctx_->n() * ctx_->s();
        Mat m(ctx_->sub_field(), dim(), cols);
        for (uint32_t r = 0; r < dim(); ++r) {
            auto row = expand(basis_[r]);
            for (uint32_t c = 0; c < cols; ++c) m.at(r, c) = row[c];
        }
        if (m.echelonize(true) != dim())
            throw DimensionError("basis is not F_q-independent");
        echelon_ = std::move(m);
    }

    void reduce_against_echelon(std::vector<uint32_t>& row) const {
        const auto& f = ctx_->sub_field();
        const uint32_t cols = ctx_->n() * ctx_->n() * ctx_->s();
        for (uint32_t r = 0; r < dim(); ++r) {
            uint32_t lead = 0;
            while (lead < cols && echelon_.at(r, lead) == 0) ++lead;
            if (lead == cols) continue;
            uint32_t v = row[lead];
            if (!v) continue;
            for (uint32_t c = 0; c < cols; ++c)
                row[c] = f->sub(row[c], f->mul(v, echelon_.at(r, c)));
        }
    }
};

/// True iff all q^k - 1 nonzero span elements are invertible.
inline bool is_semifield_code(const MatrixCode& c) {
    auto sp = c.span();
    for (size_t i = 1; i < sp.size(); ++i)
        if (!sp[i].invertible()) return false;
    return true;
}

/// Incremental variant: c_old is known all-invertible; checks only the new
/// elements x + lambda*a for x in span(c_old), lambda != 0.
inline bool is_semifield_code_incremental(const MatrixCode& c_old, const Mat& a) {
    const auto& ctx = c_old.context();
    const auto& emb = ctx->rep().embedding();
    auto sp = c_old.span();
    for (uint64_t lam = 1; lam < ctx->q(); ++lam) {
        Mat la = a.scaled(emb.map((uint32_t)lam));
        for (const auto& x : sp)
            if (!(x + la).invertible()) return false;
    }
    return true;
}

/// Lookup from first rows to span elements of a full spread set. Build fails
/// on duplicate first rows (non-spread-set input).
class FirstRowIndex {
public:
    explicit FirstRowIndex(const MatrixCode& c) : ctx_(c.context()) {
        if (c.dim() != ctx_->ns()) throw DimensionError("first-row index needs a full spread set");
        auto sp = c.span();
        table_.reserve(sp.size());
        for (auto& m : sp) {
            uint64_t key = row_key(m);
            if (!table_.emplace(key, m).second)
                throw DimensionError("duplicate first rows: not a spread set");
        }
    }

    uint64_t row_key(const Mat& m) const {
        uint64_t key = 0;
        for (uint32_t j = ctx_->n(); j-- > 0;) key = key * ctx_->big_field()->size() + m.at(0, j);
        return key;
    }
    uint64_t vec_key(const std::vector<uint32_t>& row) const {
        uint64_t key = 0;
        for (uint32_t j = ctx_->n(); j-- > 0;) key = key * ctx_->big_field()->size() + row[j];
        return key;
    }

    const Mat* lookup_row(const std::vector<uint32_t>& row) const {
        auto it = table_.find(vec_key(row));
        return it == table_.end() ? nullptr : &it->second;
    }
    bool contains(const Mat& m) const {
        auto it = table_.find(row_key(m));
        return it != table_.end() && it->second == m;
    }
    size_t size() const { return table_.size(); }

private:
    ContextPtr ctx_;
    std::unordered_map<uint64_t, Mat> table_;
};

/// Canonical basis: for a full spread set, the unique basis whose element
/// with index k = i + (j-1)s + 1 has first row theta^i e_j; for partial
/// codes, the reduced echelon basis.
inline MatrixCode canonical_basis(const MatrixCode& c) {
    const auto& ctx = c.context();
    if (c.dim() < ctx->ns()) return c.echelon_basis();
    FirstRowIndex idx(c);
    std::vector<Mat> basis;
    for (uint32_t k = 1; k <= ctx->ns(); ++k) {
        auto row = ctx->prescribed_first_row(k);
        const Mat* m = idx.lookup_row(row);
        if (!m) throw DimensionError("first-row map not surjective: not a spread set");
        basis.push_back(*m);
    }
    return MatrixCode(ctx, std::move(basis));
}

/// The ns seed sets S_1..S_ns: all invertible matrices whose first row is
/// theta^i e_j, with k = i + (j-1)s + 1. Deterministic enumeration order.
struct SeedSets {
    ContextPtr ctx;
    std::vector<std::vector<Mat>> sets;
};

inline SeedSets seed_sets(const ContextPtr& ctx) {
    const uint32_t n = ctx->n();
    const uint64_t Q = ctx->big_field()->size();
    uint64_t rest = 1;
    for (uint32_t i = 0; i < n * (n - 1); ++i) {
        rest *= Q;
        if (rest > (1ull << 22)) throw GuardError("seed enumeration too large");
    }
    SeedSets out;
    out.ctx = ctx;
    out.sets.resize(ctx->ns());
    for (uint32_t k = 1; k <= ctx->ns(); ++k) {
        auto row = ctx->prescribed_first_row(k);
        for (uint64_t code = 0; code < rest; ++code) {
            Mat m(ctx->big_field(), n, n);
            for (uint32_t j = 0; j < n; ++j) m.at(0, j) = row[j];
            uint64_t t = code;
            for (uint32_t i = 1; i < n; ++i)
                for (uint32_t j = 0; j < n; ++j) {
                    m.at(i, j) = (uint32_t)(t % Q);
                    t /= Q;
                }
            if (m.invertible()) out.sets[k - 1].push_back(std::move(m));
        }
    }
    return out;
}

/// Bilinear product on (F_{q^s})^n, F_{q^s}-linear in the left argument.
using MultFn = std::function<std::vector<uint32_t>(const std::vector<uint32_t>&,
                                                   const std::vector<uint32_t>&)>;

/// Spread set { R_y } of a presemifield product, as a MatrixCode of dimension
/// ns with basis R_{theta^i e_j} in seed order. Validates left-linearity
/// (exhaustively at desk scale) and the absence of zero divisors.
inline MatrixCode spread_from_mult(const ContextPtr& ctx, const MultFn& mult) {
    const uint32_t n = ctx->n(), s = ctx->s();
    const auto& big = ctx->big_field();

    auto rmat = [&](const std::vector<uint32_t>& y) {
        Mat m(big, n, n);
        for (uint32_t i = 0; i < n; ++i) {
            std::vector<uint32_t> ei(n, 0);
            ei[i] = 1;
            auto prod = mult(ei, y);
            if (prod.size() != n) throw DimensionError("mult must return vectors of length n");
            for (uint32_t j = 0; j < n; ++j) m.at(i, j) = prod[j];
        }
        return m;
    };

    // validate left F_{q^s}-linearity: x * R_y == mult(x, y); exhaustive over
    // x when the module is small, sampled otherwise
    auto check_left_linear = [&](const Mat& m, const std::vector<uint32_t>& y) {
        uint64_t total = 1;
        bool exhaustive = true;
        for (uint32_t i = 0; i < n; ++i) {
            total *= big->size();
            if (total > (1ull << 16)) { exhaustive = false; break; }
        }
        uint64_t limit = exhaustive ? total : 4096;
        for (uint64_t code = 0; code < limit; ++code) {
            uint64_t t = exhaustive ? code : (code * 2654435761u) % total;
            std::vector<uint32_t> x(n);
            for (uint32_t i = 0; i < n; ++i) {
                x[i] = (uint32_t)(t % big->size());
                t /= big->size();
            }
            auto prod = mult(x, y);
            for (uint32_t j = 0; j < n; ++j) {
                uint32_t acc = 0;
                for (uint32_t i = 0; i < n; ++i) acc = big->add(acc, big->mul(x[i], m.at(i, j)));
                if (acc != prod[j])
                    throw FieldError("product is not F_{q^s}-linear in the left argument");
            }
        }
    };

    std::vector<Mat> basis;
    for (uint32_t k = 1; k <= ctx->ns(); ++k) {
        auto y = ctx->prescribed_first_row(k);
        Mat m = rmat(y);
        check_left_linear(m, y);
        basis.push_back(std::move(m));
    }
    MatrixCode c(ctx, std::move(basis));
    if (!is_semifield_code(c))
        throw FieldError("zero divisors detected: some nonzero R_y is singular");
    (void)s;
    return c;
}

/// The Desarguesian spread set: right multiplications of F_{q^{ns}} viewed as
/// an n-dimensional F_{q^s}-space with basis 1, Theta, ..., Theta^(n-1).
inline MatrixCode desarguesian_code(const ContextPtr& ctx) {
    const uint32_t n = ctx->n();
    const auto& big = ctx->big_field();
    FieldPtr huge = Field::make(big->characteristic(), big->degree() * n);
    Embedding emb = Embedding::find(big, huge);

    std::vector<uint32_t> bpow(n);
    uint32_t t = 1;
    for (uint32_t i = 0; i < n; ++i) {
        bpow[i] = t;
        t = huge->mul(t, huge->generator());
    }
    // coords of huge elements in basis {Theta^i} over F_{q^s}
    std::vector<std::vector<uint32_t>> coords(huge->size());
    std::vector<uint32_t> tuple(n, 0);
    while (true) {
        uint32_t x = 0;
        for (uint32_t i = 0; i < n; ++i) x = huge->add(x, huge->mul(emb.map(tuple[i]), bpow[i]));
        coords[x] = tuple;
        uint32_t pos = 0;
        while (pos < n) {
            if (++tuple[pos] < big->size()) break;
            tuple[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    auto compose = [&](const std::vector<uint32_t>& v) {
        uint32_t x = 0;
        for (uint32_t i = 0; i < n; ++i) x = huge->add(x, huge->mul(emb.map(v[i]), bpow[i]));
        return x;
    };
    MultFn mult = [&, compose](const std::vector<uint32_t>& x,
                               const std::vector<uint32_t>& y) {
        return coords[huge->mul(compose(x), compose(y))];
    };
    return spread_from_mult(ctx, mult);
}

}  // namespace rmc
