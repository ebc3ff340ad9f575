// vectorcode.hpp — F_{q^s}-linear vector rank-metric codes with canonical
// echelon generators, the code D(C) associated to a matrix code, and rank
// weights.
#pragma once

#include <cstdint>
#include <vector>

#include "rmc/spreadset.hpp"

namespace rmc {

/// An F_{q^s}-row space in (F_{q^s})^k, stored as its unique reduced row
/// echelon generator (zero rows dropped). Dimension may be anything up to k;
/// degenerate codes are first-class values.
class VectorCode {
public:
    VectorCode(FieldPtr f, uint64_t q, uint32_t length, const std::vector<std::vector<uint32_t>>& rows)
        : f_(std::move(f)), q_(q), length_(length) {
        f_->check_subfield_order(q_);
        Mat m(f_, (uint32_t)rows.size(), length_);
        for (uint32_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != length_) throw DimensionError("generator row length mismatch");
            for (uint32_t j = 0; j < length_; ++j) m.at(i, j) = rows[i][j];
        }
        dim_ = m.echelonize(true);
        gen_.resize(size_t(dim_) * length_);
        for (uint32_t i = 0; i < dim_; ++i)
            for (uint32_t j = 0; j < length_; ++j) gen_[size_t(i) * length_ + j] = m.at(i, j);
    }

    const FieldPtr& field() const { return f_; }
    uint64_t q() const { return q_; }
    uint32_t length() const { return length_; }
    uint32_t dim() const { return dim_; }
    uint32_t gen_at(uint32_t i, uint32_t j) const { return gen_[size_t(i) * length_ + j]; }
    const std::vector<uint32_t>& generator_entries() const { return gen_; }

    bool operator==(const VectorCode& o) const {
        return length_ == o.length_ && dim_ == o.dim_ && q_ == o.q_ && gen_ == o.gen_ &&
               f_->same_field(*o.f_);
    }

    /// Stable canonical key for hashing and exact dedup.
    std::vector<uint32_t> key() const {
        std::vector<uint32_t> k{length_, dim_, (uint32_t)q_};
        k.insert(k.end(), gen_.begin(), gen_.end());
        return k;
    }

private:
    FieldPtr f_;
    uint64_t q_;
    uint32_t length_, dim_ = 0;
    std::vector<uint32_t> gen_;
};

/// D(C): the F_{q^s}-row space of the n^2 x k matrix whose columns are
/// vec(A_i) over the basis of C. Length k, dimension at most n^2.
inline VectorCode vector_code(const MatrixCode& c) {
    const auto& ctx = c.context();
    const uint32_t nn = ctx->n() * ctx->n(), k = c.dim();
    std::vector<std::vector<uint32_t>> rows(nn, std::vector<uint32_t>(k, 0));
    for (uint32_t i = 0; i < k; ++i) {
        Mat v = c.basis()[i].vec();
        for (uint32_t r = 0; r < nn; ++r) rows[r][i] = v.at(r, 0);
    }
    return VectorCode(ctx->big_field(), ctx->q(), k, rows);
}

/// F_q-dimension of the span of the coordinates of a vector over F_{q^s}.
inline uint32_t rank_weight(const RegularRep& rep, const std::vector<uint32_t>& v) {
    const uint32_t s = rep.ext_degree();
    Mat m(rep.sub_field(), (uint32_t)v.size(), s);
    for (uint32_t i = 0; i < v.size(); ++i) {
        const auto& c = rep.coords(v[i]);
        for (uint32_t j = 0; j < s; ++j) m.at(i, j) = c[j];
    }
    return m.rank();
}

/// Rank-weight distribution of a vector code: counts of rank weights over all
/// q^dim ... over the full codeword enumeration is exponential; this uses the
/// coordinate q-system instead, which is what the equivalence tests consume.
/// Returns the multiset of point weights of the associated linear set,
/// encoded as sorted (weight, count) pairs, plus the q-system F_q-dimension.
struct QSystemProfile {
    uint32_t dim_fq = 0;                              // dim_Fq of the q-system
    std::vector<std::pair<uint32_t, uint64_t>> weights;  // sorted (weight, #points)
    bool operator==(const QSystemProfile&) const = default;
};

}  // namespace rmc
