#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rmc/linalg.hpp"

using namespace rmc;

namespace {

Mat random_mat(const FieldPtr& f, uint32_t r, uint32_t c, std::mt19937_64& rng) {
    Mat m(f, r, c);
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j) m.at(i, j) = (uint32_t)(rng() % f->size());
    return m;
}

Mat random_invertible(const FieldPtr& f, uint32_t n, std::mt19937_64& rng) {
    while (true) {
        Mat m = random_mat(f, n, n, rng);
        if (m.invertible()) return m;
    }
}

// rank by exhaustive minor expansion, independent of Gaussian elimination
uint32_t minor_rank_oracle(const Mat& m) {
    const auto& f = m.field();
    uint32_t best = 0;
    std::function<uint32_t(std::vector<uint32_t>, std::vector<uint32_t>)> det =
        [&](std::vector<uint32_t> rows, std::vector<uint32_t> cols) -> uint32_t {
        if (rows.size() == 1) return m.at(rows[0], cols[0]);
        uint32_t acc = 0;
        std::vector<uint32_t> subrows(rows.begin() + 1, rows.end());
        for (size_t j = 0; j < cols.size(); ++j) {
            uint32_t a = m.at(rows[0], cols[j]);
            if (!a) continue;
            std::vector<uint32_t> subcols;
            for (size_t t = 0; t < cols.size(); ++t)
                if (t != j) subcols.push_back(cols[t]);
            uint32_t d = det(subrows, subcols);
            uint32_t term = f->mul(a, d);
            acc = (j % 2) ? f->sub(acc, term) : f->add(acc, term);
        }
        return acc;
    };
    for (uint32_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
        // all k x k minors
        std::vector<uint32_t> rs(k), cs(k);
        std::function<bool(uint32_t, uint32_t)> any_nonzero = [&](uint32_t, uint32_t) { return false; };
        (void)any_nonzero;
        bool found = false;
        std::function<void(uint32_t, uint32_t)> loop_rows = [&](uint32_t pos, uint32_t start) {
            if (found) return;
            if (pos == k) {
                std::function<void(uint32_t, uint32_t)> loop_cols = [&](uint32_t cp, uint32_t cstart) {
                    if (found) return;
                    if (cp == k) {
                        if (det(rs, cs) != 0) found = true;
                        return;
                    }
                    for (uint32_t c = cstart; c < m.cols(); ++c) {
                        cs[cp] = c;
                        loop_cols(cp + 1, c + 1);
                    }
                };
                loop_cols(0, 0);
                return;
            }
            for (uint32_t r = start; r < m.rows(); ++r) {
                rs[pos] = r;
                loop_rows(pos + 1, r + 1);
            }
        };
        loop_rows(0, 0);
        if (found) best = k;
    }
    return best;
}

}  // namespace

TEST_CASE("rank basics") {
    auto f = Field::make(2, 4);
    REQUIRE(Mat::zero(f, 2, 2).rank() == 0);
    REQUIRE(Mat::identity(f, 3).rank() == 3);
    // second row is theta * first row
    Mat m(f, 2, 2, {1, 2, 2, 4});
    REQUIRE(m.rank() == 1);
}

TEST_CASE("gaussian rank agrees with the minor-expansion oracle") {
    for (auto f : {Field::make(2, 1), Field::make(2, 2)}) {
        const uint32_t q = (uint32_t)f->size();
        // all 2x2 matrices
        for (uint32_t code = 0; code < q * q * q * q; ++code) {
            uint32_t t = code;
            Mat m(f, 2, 2);
            for (uint32_t i = 0; i < 2; ++i)
                for (uint32_t j = 0; j < 2; ++j) {
                    m.at(i, j) = t % q;
                    t /= q;
                }
            if (m.is_zero()) continue;
            REQUIRE(m.rank() == minor_rank_oracle(m));
        }
        // random 3x3 sample
        std::mt19937_64 rng(7);
        for (int i = 0; i < 200; ++i) {
            Mat m = random_mat(f, 3, 3, rng);
            if (m.is_zero()) continue;
            REQUIRE(m.rank() == minor_rank_oracle(m));
        }
    }
}

TEST_CASE("inverse") {
    auto f = Field::make(2, 4);
    REQUIRE(Mat::identity(f, 2).inverse() == Mat::identity(f, 2));
    Mat sing(f, 2, 2, {1, 1, 1, 1});
    REQUIRE_THROWS_AS(sing.inverse(), SingularMatrix);
    // diag(theta, 1) inverts to diag(theta^3+1, 1), from the field inverse
    Mat d(f, 2, 2, {2, 0, 0, 1});
    Mat di = d.inverse();
    REQUIRE(di == Mat(f, 2, 2, {f->inv(2), 0, 0, 1}));
    REQUIRE(di.at(0, 0) == 9);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        Mat m = random_invertible(f, 3, rng);
        REQUIRE(m * m.inverse() == Mat::identity(f, 3));
    }
}

TEST_CASE("kronecker product") {
    auto f = Field::make(2, 4);
    std::mt19937_64 rng(11);
    Mat a = random_mat(f, 2, 2, rng);
    REQUIRE(Mat::identity(f, 1).kron(a) == a);
    Mat b = random_mat(f, 4, 4, rng);
    REQUIRE(a.kron(b).rows() == 8);
    REQUIRE(a.kron(b).cols() == 8);
}

TEST_CASE("vec is column-major") {
    auto f = Field::make(2, 4);
    Mat m(f, 2, 2, {7, 11, 9, 13});  // [[a,b],[c,d]]
    Mat v = m.vec();
    REQUIRE(v.at(0, 0) == 7);   // a
    REQUIRE(v.at(1, 0) == 9);   // c
    REQUIRE(v.at(2, 0) == 11);  // b
    REQUIRE(v.at(3, 0) == 13);  // d
    REQUIRE(Mat::zero(f, 2, 2).vec().is_zero());
    std::mt19937_64 rng(5);
    Mat a = random_mat(f, 2, 2, rng), b = random_mat(f, 2, 2, rng);
    REQUIRE((a + b).vec() == a.vec() + b.vec());
}

TEST_CASE("vec(XAY) = (Y^T kron X) vec(A)") {
    auto f = Field::make(2, 4);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        Mat x = random_mat(f, 2, 2, rng);
        Mat a = random_mat(f, 2, 2, rng);
        Mat y = random_mat(f, 2, 2, rng);
        REQUIRE((x * a * y).vec() == y.transpose().kron(x) * a.vec());
    }
}

TEST_CASE("map_entries") {
    auto f = Field::make(2, 4);
    std::mt19937_64 rng(23);
    Mat a = random_mat(f, 2, 2, rng);
    REQUIRE(a.map_entries(FieldAut{0}) == a);
    for (auto rho : f->automorphisms()) {
        REQUIRE(a.map_entries(rho).map_entries(f->invert(rho)) == a);
        REQUIRE(a.map_entries(rho).rank() == a.rank());
    }
}

TEST_CASE("rank invariances") {
    auto f = Field::make(2, 4);
    std::mt19937_64 rng(29);
    for (int i = 0; i < 50; ++i) {
        Mat a = random_mat(f, 3, 3, rng);
        REQUIRE(a.rank() == a.transpose().rank());
        Mat x = random_invertible(f, 3, rng), y = random_invertible(f, 3, rng);
        REQUIRE((x * a * y).rank() == a.rank());
    }
}

TEST_CASE("charpoly coefficients") {
    auto f = Field::make(2, 4);
    // companion-style check: det(xI - M) for diag(a, b) is (x-a)(x-b)
    Mat d(f, 2, 2, {3, 0, 0, 5});
    auto c = charpoly_coeffs(d);
    REQUIRE(c.size() == 3);
    REQUIRE(c[2] == 1);
    REQUIRE(c[1] == f->add(3, 5));          // -(a+b), char 2
    REQUIRE(c[0] == f->mul(3, 5));          // ab
    std::mt19937_64 rng(31);
    for (int i = 0; i < 30; ++i) {
        Mat a = random_mat(f, 2, 2, rng);
        Mat x = random_invertible(f, 2, rng);
        REQUIRE(charpoly_coeffs(x * a * x.inverse()) == charpoly_coeffs(a));
    }
}
