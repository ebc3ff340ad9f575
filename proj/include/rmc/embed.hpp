// embed.hpp — the embedding chain M_n(F_{q^s}) -> M_{ns}(F_q) -> M_{ns}(F_{q^m}):
// regular representation phi, block map phibar, direct-sum form psi, Moore
// matrix Z and the block permutation P.
#pragma once

#include <cstdint>
#include <vector>

#include "rmc/linalg.hpp"

namespace rmc {

/// F_{q^s} viewed as a vector space over F_q with the power basis
/// 1, theta, ..., theta^(s-1), plus the regular representation
/// phi : F_{q^s} -> M_s(F_q) with respect to that basis.
///
/// Coordinates are table-driven: built once by enumerating all q^s
/// coefficient tuples, which also certifies that the power basis really is a
/// basis over F_q.
class RegularRep {
public:
    RegularRep(FieldPtr big, FieldPtr sub)
        : big_(std::move(big)), sub_(std::move(sub)), emb_(Embedding::find(sub_, big_)) {
        if (big_->degree() % sub_->degree() != 0)
            throw FieldError("subfield degree must divide field degree");
        s_ = big_->degree() / sub_->degree();
        build_coords();
    }

    const FieldPtr& big_field() const { return big_; }
    const FieldPtr& sub_field() const { return sub_; }
    const Embedding& embedding() const { return emb_; }
    uint64_t base_order() const { return sub_->size(); }
    uint32_t ext_degree() const { return s_; }

    /// Coordinates of x in the power basis, as s codes of the subfield.
    const std::vector<uint32_t>& coords(uint32_t x) const { return coords_[x]; }

    /// Element from power-basis coordinates.
    uint32_t compose(const std::vector<uint32_t>& c) const {
        uint32_t acc = 0;
        for (uint32_t i = 0; i < s_; ++i)
            acc = big_->add(acc, big_->mul(emb_.map(c[i]), theta_pow_[i]));
        return acc;
    }

    /// Matrix of y -> alpha*y with respect to the power basis (s x s over F_q).
    Mat phi(uint32_t alpha) const {
        Mat m(sub_, s_, s_);
        for (uint32_t j = 0; j < s_; ++j) {
            const auto& col = coords_[big_->mul(alpha, theta_pow_[j])];
            for (uint32_t i = 0; i < s_; ++i) m.at(i, j) = col[i];
        }
        return m;
    }

    /// Block matrix phibar(A) = (phi(a_ij)), ns x ns over F_q.
    Mat phibar(const Mat& a) const {
        if (!a.field()->same_field(*big_)) throw FieldError("phibar: field mismatch");
        if (a.rows() != a.cols()) throw DimensionError("phibar: square input required");
        const uint32_t n = a.rows();
        Mat m(sub_, n * s_, n * s_);
        for (uint32_t bi = 0; bi < n; ++bi)
            for (uint32_t bj = 0; bj < n; ++bj) {
                Mat blk = phi(a.at(bi, bj));
                for (uint32_t i = 0; i < s_; ++i)
                    for (uint32_t j = 0; j < s_; ++j)
                        m.at(bi * s_ + i, bj * s_ + j) = blk.at(i, j);
            }
        return m;
    }

private:
    FieldPtr big_, sub_;
    Embedding emb_;
    uint32_t s_ = 0;
    std::vector<uint32_t> theta_pow_;
    std::vector<std::vector<uint32_t>> coords_;

    void build_coords() {
        theta_pow_.resize(s_);
        uint32_t t = 1;
        for (uint32_t i = 0; i < s_; ++i) {
            theta_pow_[i] = t;
            t = big_->mul(t, big_->generator());
        }
        coords_.assign(big_->size(), {});
        std::vector<uint32_t> tuple(s_, 0);
        uint64_t total = 1;
        for (uint32_t i = 0; i < s_; ++i) total *= sub_->size();
        uint64_t filled = 0;
        while (true) {
            uint32_t x = compose(tuple);
            if (!coords_[x].empty() && x != 0)
                throw FieldError("power basis is not a basis over the subfield");
            coords_[x] = tuple;
            ++filled;
            // odometer
            uint32_t pos = 0;
            while (pos < s_) {
                if (++tuple[pos] < sub_->size()) break;
                tuple[pos] = 0;
                ++pos;
            }
            if (pos == s_) break;
        }
        if (filled != total || total != big_->size())
            throw FieldError("power basis does not span");
    }
};

/// psi(A) = A + A^sigma + ... + A^(sigma^(s-1)) as a block-diagonal matrix
/// over F_{q^s}, sigma the q-power Frobenius.
inline Mat psi(const Mat& a, uint64_t base_order) {
    if (a.rows() != a.cols()) throw DimensionError("psi: square input required");
    const auto& f = a.field();
    f->check_subfield_order(base_order);
    uint32_t s = 0;
    {
        uint64_t t = base_order;
        uint32_t e = 0;
        while (t % f->characteristic() == 0) { t /= f->characteristic(); ++e; }
        s = f->degree() / e;
    }
    const uint32_t n = a.rows();
    Mat m(f, n * s, n * s);
    for (uint32_t j = 0; j < s; ++j)
        for (uint32_t r = 0; r < n; ++r)
            for (uint32_t c = 0; c < n; ++c)
                m.at(j * n + r, j * n + c) = f->frobenius(base_order, a.at(r, c), j);
    return m;
}

/// Moore matrix: row i is (v_1^(sigma^i), ..., v_s^(sigma^i)). Throws if the
/// given tuple is F_q-dependent (singular Moore matrix).
inline Mat moore_matrix(const FieldPtr& f, uint64_t base_order,
                        const std::vector<uint32_t>& basis) {
    f->check_subfield_order(base_order);
    const uint32_t s = (uint32_t)basis.size();
    Mat z(f, s, s);
    for (uint32_t i = 0; i < s; ++i)
        for (uint32_t j = 0; j < s; ++j) z.at(i, j) = f->frobenius(base_order, basis[j], i);
    if (z.rank() != s) throw SingularMatrix("Moore matrix singular: dependent basis tuple");
    return z;
}

/// Permutation matrix P reindexing from (matrix-index a, conjugate-index u)
/// interleaving to conjugate-major order: position a*s+u -> u*n+a, so that
/// (P Zbar) phibar(A) (P Zbar)^-1 = psi(A).
inline Mat block_perm(const FieldPtr& f, uint32_t n, uint32_t s) {
    Mat p(f, n * s, n * s);
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t u = 0; u < s; ++u) p.at(u * n + a, a * s + u) = 1;
    return p;
}

}  // namespace rmc
