// packed.hpp — byte-packed 2x2 matrices over small binary fields. Hot-path
// twin of the generic linalg path with identical semantics; the test suite
// cross-checks the two representations against each other.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rmc/spreadset.hpp"

namespace rmc {

/// 2x2 matrix over GF(2^r), r <= 8, packed into a uint32: bytes are
/// (a, b, c, d) = (at(0,0), at(0,1), at(1,0), at(1,1)), little-endian.
/// Addition is XOR. Requires characteristic 2.
class PackedOps {
public:
    explicit PackedOps(FieldPtr f) : f_(std::move(f)) {
        if (f_->characteristic() != 2) throw GuardError("packed ops require characteristic 2");
        if (f_->size() > 256) throw GuardError("packed ops require field size <= 256");
        Q_ = (uint32_t)f_->size();
        mul_.assign(256 * 256, 0);
        for (uint32_t a = 0; a < Q_; ++a)
            for (uint32_t b = 0; b < Q_; ++b) mul_[(a << 8) | b] = (uint8_t)f_->mul(a, b);
        inv_.assign(Q_, 0);
        for (uint32_t a = 1; a < Q_; ++a) inv_[a] = (uint8_t)f_->inv(a);
    }

    const FieldPtr& field() const { return f_; }
    uint32_t q() const { return Q_; }

    uint32_t mul(uint32_t a, uint32_t b) const { return mul_[((a & 255) << 8) | (b & 255)]; }
    uint32_t inv(uint32_t a) const { return inv_[a]; }

    static uint32_t pack(uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
        return a | (b << 8) | (c << 16) | (d << 24);
    }
    uint32_t from_mat(const Mat& m) const {
        return pack(m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1));
    }
    Mat to_mat(uint32_t p) const {
        Mat m(f_, 2, 2);
        m.at(0, 0) = p & 255;
        m.at(0, 1) = (p >> 8) & 255;
        m.at(1, 0) = (p >> 16) & 255;
        m.at(1, 1) = p >> 24;
        return m;
    }

    uint32_t det(uint32_t m) const {
        return mul_[((m & 255) << 8) | (m >> 24)] ^
               mul_[(m & 0xff00) | ((m >> 16) & 255)];
    }
    uint32_t rank(uint32_t m) const { return m == 0 ? 0 : (det(m) ? 2 : 1); }
    /// (trace | det << 8) — conjugation invariant pair.
    uint32_t charpair(uint32_t m) const {
        return ((m ^ (m >> 24)) & 255) | (det(m) << 8);
    }

    uint32_t matmul(uint32_t x, uint32_t y) const {
        uint32_t a = x & 255, b = (x >> 8) & 255, c = (x >> 16) & 255, d = x >> 24;
        uint32_t e = y & 255, g = (y >> 16) & 255, f = (y >> 8) & 255, h = y >> 24;
        return pack(mul_[(a << 8) | e] ^ mul_[(b << 8) | g], mul_[(a << 8) | f] ^ mul_[(b << 8) | h],
                    mul_[(c << 8) | e] ^ mul_[(d << 8) | g], mul_[(c << 8) | f] ^ mul_[(d << 8) | h]);
    }
    uint32_t scalar_mul(uint32_t lambda, uint32_t m) const {
        return pack(mul_[(lambda << 8) | (m & 255)], mul_[(lambda << 8) | ((m >> 8) & 255)],
                    mul_[(lambda << 8) | ((m >> 16) & 255)], mul_[(lambda << 8) | (m >> 24)]);
    }
    uint32_t inverse(uint32_t m) const {
        uint32_t dt = det(m);
        if (!dt) throw SingularMatrix("packed inverse of singular matrix");
        uint32_t id = inv_[dt];
        return pack(mul_[(id << 8) | (m >> 24)], mul_[(id << 8) | ((m >> 8) & 255)],
                    mul_[(id << 8) | ((m >> 16) & 255)], mul_[(id << 8) | (m & 255)]);
    }
    /// Entrywise x -> x^(2^j).
    uint32_t map_entries(uint32_t m, uint32_t j) const {
        uint32_t r = 0;
        for (uint32_t t = 0; t < 4; ++t) {
            uint32_t v = (m >> (8 * t)) & 255;
            for (uint32_t i = 0; i < j; ++i) v = mul_[(v << 8) | v];
            r |= v << (8 * t);
        }
        return r;
    }

    /// XOR-subset span of an F_2-basis; element at index mask is the sum of
    /// the basis elements selected by mask.
    std::vector<uint32_t> span(const std::vector<uint32_t>& basis) const {
        std::vector<uint32_t> sp(size_t(1) << basis.size());
        sp[0] = 0;
        for (size_t i = 0; i < basis.size(); ++i)
            for (size_t t = 0; t < (size_t(1) << i); ++t) sp[(size_t(1) << i) + t] = sp[t] ^ basis[i];
        return sp;
    }

private:
    FieldPtr f_;
    uint32_t Q_ = 0;
    std::vector<uint8_t> mul_, inv_;
};

/// F_2-expansion of a packed 2x2 over GF(2^s') as a bit row in column-major
/// vec order (a, c, b, d), s' bits per entry. Used for span echelons and
/// membership when q = 2.
inline uint64_t packed_expand_bits(uint32_t m, uint32_t sbits) {
    uint64_t a = m & 255, b = (m >> 8) & 255, c = (m >> 16) & 255, d = m >> 24;
    return a | (c << sbits) | (b << (2 * sbits)) | (d << (3 * sbits));
}
inline uint32_t packed_contract_bits(uint64_t row, uint32_t sbits) {
    uint64_t mask = (1ull << sbits) - 1;
    return (uint32_t)((row & mask) | (((row >> (2 * sbits)) & mask) << 8) |
                      (((row >> sbits) & mask) << 16) | (((row >> (3 * sbits)) & mask) << 24));
}

/// Reduced echelon form of F_2 bit rows (in-place), returns rank.
inline uint32_t bitrows_rref(std::vector<uint64_t>& rows) {
    uint32_t rank = 0;
    for (int bit = 63; bit >= 0 && rank < rows.size(); --bit) {
        uint64_t b = 1ull << bit;
        uint32_t piv = rank;
        while (piv < rows.size() && !(rows[piv] & b)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (uint32_t r = 0; r < rows.size(); ++r)
            if (r != rank && (rows[r] & b)) rows[r] ^= rows[rank];
        ++rank;
    }
    rows.resize(rank);
    return rank;
}
inline bool bitrows_member(const std::vector<uint64_t>& rref, uint64_t v) {
    for (uint64_t r : rref) {
        // leading bit of r
        uint64_t lead = 1ull << (63 - __builtin_clzll(r));
        if (v & lead) v ^= r;
    }
    return v == 0;
}

}  // namespace rmc
