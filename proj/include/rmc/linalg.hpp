// linalg.hpp — dense matrices over a Field: rank, inverse, products,
// Kronecker products, vectorization, entrywise automorphisms.
#pragma once

#include <cstdint>
#include <vector>

#include "rmc/gf.hpp"

namespace rmc {

/// Dense row-major matrix of element codes over a fixed field. Value type;
/// all operations are pure.
class Mat {
public:
    Mat() = default;
    Mat(FieldPtr f, uint32_t rows, uint32_t cols)
        : f_(std::move(f)), rows_(rows), cols_(cols), e_(size_t(rows) * cols, 0) {}
    Mat(FieldPtr f, uint32_t rows, uint32_t cols, std::vector<uint32_t> entries)
        : f_(std::move(f)), rows_(rows), cols_(cols), e_(std::move(entries)) {
        if (e_.size() != size_t(rows_) * cols_) throw DimensionError("entry count mismatch");
        for (uint32_t v : e_)
            if (v >= f_->size()) throw FieldError("entry out of range");
    }

    static Mat identity(FieldPtr f, uint32_t n) {
        Mat m(std::move(f), n, n);
        for (uint32_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    static Mat zero(FieldPtr f, uint32_t r, uint32_t c) { return Mat(std::move(f), r, c); }

    const FieldPtr& field() const { return f_; }
    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    uint32_t& at(uint32_t i, uint32_t j) { return e_[size_t(i) * cols_ + j]; }
    uint32_t at(uint32_t i, uint32_t j) const { return e_[size_t(i) * cols_ + j]; }
    const std::vector<uint32_t>& entries() const { return e_; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_ && f_->same_field(*o.f_);
    }

    Mat operator+(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = f_->add(e_[i], o.e_[i]);
        return r;
    }
    Mat operator-(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = f_->sub(e_[i], o.e_[i]);
        return r;
    }
    Mat operator*(const Mat& o) const {
        check_same_field(o);
        if (cols_ != o.rows_) throw DimensionError("inner dimension mismatch");
        Mat r(f_, rows_, o.cols_);
        for (uint32_t i = 0; i < rows_; ++i)
            for (uint32_t k = 0; k < cols_; ++k) {
                uint32_t a = at(i, k);
                if (!a) continue;
                for (uint32_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = f_->add(r.at(i, j), f_->mul(a, o.at(k, j)));
            }
        return r;
    }
    Mat scaled(uint32_t lambda) const {
        Mat r = *this;
        for (auto& v : r.e_) v = f_->mul(lambda, v);
        return r;
    }
    Mat transpose() const {
        Mat r(f_, cols_, rows_);
        for (uint32_t i = 0; i < rows_; ++i)
            for (uint32_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    bool is_zero() const {
        for (uint32_t v : e_)
            if (v) return false;
        return true;
    }

    /// Row echelon rank, first nonzero pivot in column order.
    uint32_t rank() const {
        Mat w = *this;
        return w.echelonize(false);
    }
    bool invertible() const { return rows_ == cols_ && rank() == rows_; }

    Mat inverse() const {
        if (rows_ != cols_) throw DimensionError("inverse of non-square matrix");
        const uint32_t n = rows_;
        Mat aug(f_, n, 2 * n);
        for (uint32_t i = 0; i < n; ++i) {
            for (uint32_t j = 0; j < n; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, n + i) = 1;
        }
        for (uint32_t c = 0; c < n; ++c) {  // pivots restricted to the left block
            uint32_t piv = c;
            while (piv < n && aug.at(piv, c) == 0) ++piv;
            if (piv == n) throw SingularMatrix("singular matrix");
            if (piv != c)
                for (uint32_t j = 0; j < 2 * n; ++j) std::swap(aug.at(piv, j), aug.at(c, j));
            uint32_t ip = f_->inv(aug.at(c, c));
            for (uint32_t j = 0; j < 2 * n; ++j) aug.at(c, j) = f_->mul(ip, aug.at(c, j));
            for (uint32_t r = 0; r < n; ++r) {
                if (r == c) continue;
                uint32_t v = aug.at(r, c);
                if (!v) continue;
                for (uint32_t j = 0; j < 2 * n; ++j)
                    aug.at(r, j) = f_->sub(aug.at(r, j), f_->mul(v, aug.at(c, j)));
            }
        }
        Mat r(f_, n, n);
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j) r.at(i, j) = aug.at(i, n + j);
        return r;
    }

    /// Kronecker product; block (i,j) equals a_ij * B.
    Mat kron(const Mat& b) const {
        check_same_field(b);
        Mat r(f_, rows_ * b.rows_, cols_ * b.cols_);
        for (uint32_t i = 0; i < rows_; ++i)
            for (uint32_t j = 0; j < cols_; ++j) {
                uint32_t a = at(i, j);
                if (!a) continue;
                for (uint32_t bi = 0; bi < b.rows_; ++bi)
                    for (uint32_t bj = 0; bj < b.cols_; ++bj)
                        r.at(i * b.rows_ + bi, j * b.cols_ + bj) = f_->mul(a, b.at(bi, bj));
            }
        return r;
    }

    /// Column-major vectorisation: entry (i,j) lands at position j*rows + i.
    Mat vec() const {
        Mat r(f_, rows_ * cols_, 1);
        for (uint32_t j = 0; j < cols_; ++j)
            for (uint32_t i = 0; i < rows_; ++i) r.at(j * rows_ + i, 0) = at(i, j);
        return r;
    }

    /// Entrywise automorphism A^rho.
    Mat map_entries(FieldAut rho) const {
        Mat r = *this;
        for (auto& v : r.e_) v = f_->apply(rho, v);
        return r;
    }

    /// Entrywise image in a larger field.
    Mat mapped(const Embedding& emb) const {
        if (!emb.source()->same_field(*f_)) throw FieldError("embedding source mismatch");
        Mat r(emb.target(), rows_, cols_);
        for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = emb.map(e_[i]);
        return r;
    }

    /// In-place reduction to (reduced) row echelon form; returns the rank.
    uint32_t echelonize(bool reduced) {
        uint32_t rank = 0;
        for (uint32_t c = 0; c < cols_ && rank < rows_; ++c) {
            uint32_t piv = rank;
            while (piv < rows_ && at(piv, c) == 0) ++piv;
            if (piv == rows_) continue;
            if (piv != rank)
                for (uint32_t j = 0; j < cols_; ++j) std::swap(at(piv, j), at(rank, j));
            uint32_t ip = f_->inv(at(rank, c));
            for (uint32_t j = 0; j < cols_; ++j) at(rank, j) = f_->mul(ip, at(rank, j));
            for (uint32_t r = reduced ? 0 : rank + 1; r < rows_; ++r) {
                if (r == rank) continue;
                uint32_t v = at(r, c);
                if (!v) continue;
                for (uint32_t j = 0; j < cols_; ++j)
                    at(r, j) = f_->sub(at(r, j), f_->mul(v, at(rank, j)));
            }
            ++rank;
        }
        return rank;
    }

private:
    FieldPtr f_;
    uint32_t rows_ = 0, cols_ = 0;
    std::vector<uint32_t> e_;

    void check_same_shape(const Mat& o) const {
        check_same_field(o);
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("shape mismatch");
    }
    void check_same_field(const Mat& o) const {
        if (!f_->same_field(*o.f_)) throw FieldError("field mismatch");
    }
};

/// Characteristic polynomial coefficients of a square matrix as
/// (c_0, ..., c_n) with det(xI - M) = sum c_k x^k; computed from sums of
/// principal minors, intended for small n.
inline std::vector<uint32_t> charpoly_coeffs(const Mat& m) {
    if (m.rows() != m.cols()) throw DimensionError("charpoly of non-square matrix");
    const uint32_t n = m.rows();
    const auto& f = m.field();

    // determinant of the principal submatrix indexed by sel
    auto subdet = [&](const std::vector<uint32_t>& sel) -> uint32_t {
        const uint32_t k = (uint32_t)sel.size();
        Mat s(f, k, k);
        for (uint32_t i = 0; i < k; ++i)
            for (uint32_t j = 0; j < k; ++j) s.at(i, j) = m.at(sel[i], sel[j]);
        // Gaussian determinant
        uint32_t det = 1;
        for (uint32_t c = 0; c < k; ++c) {
            uint32_t piv = c;
            while (piv < k && s.at(piv, c) == 0) ++piv;
            if (piv == k) return 0;
            if (piv != c) {
                for (uint32_t j = 0; j < k; ++j) std::swap(s.at(piv, j), s.at(c, j));
                det = f->neg(det);
            }
            det = f->mul(det, s.at(c, c));
            uint32_t ip = f->inv(s.at(c, c));
            for (uint32_t r = c + 1; r < k; ++r) {
                uint32_t v = f->mul(ip, s.at(r, c));
                if (!v) continue;
                for (uint32_t j = c; j < k; ++j)
                    s.at(r, j) = f->sub(s.at(r, j), f->mul(v, s.at(c, j)));
            }
        }
        return det;
    };

    std::vector<uint32_t> coeffs(n + 1, 0);
    coeffs[n] = 1;
    for (uint32_t k = 1; k <= n; ++k) {
        // e_k = sum over k-subsets of principal k x k minors
        uint32_t ek = 0;
        std::vector<uint32_t> sel(k);
        for (uint32_t i = 0; i < k; ++i) sel[i] = i;
        while (true) {
            ek = f->add(ek, subdet(sel));
            int32_t pos = (int32_t)k - 1;
            while (pos >= 0 && sel[pos] == n - k + pos) --pos;
            if (pos < 0) break;
            ++sel[pos];
            for (uint32_t i = pos + 1; i < k; ++i) sel[i] = sel[i - 1] + 1;
        }
        // coefficient of x^(n-k) is (-1)^k e_k
        coeffs[n - k] = (k % 2) ? f->neg(ek) : ek;
    }
    return coeffs;
}

}  // namespace rmc
