#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rmc/embed.hpp"

using namespace rmc;

namespace {
Mat random_mat(const FieldPtr& f, uint32_t r, uint32_t c, std::mt19937_64& rng) {
    Mat m(f, r, c);
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j) m.at(i, j) = (uint32_t)(rng() % f->size());
    return m;
}
}  // namespace

TEST_CASE("regular representation of GF(16) over F_2") {
    auto big = Field::make(2, 4);
    auto sub = Field::make(2, 1);
    RegularRep rep(big, sub);
    REQUIRE(rep.ext_degree() == 4);

    SECTION("phi(1) = I") { REQUIRE(rep.phi(1) == Mat::identity(sub, 4)); }
    SECTION("phi(theta) is the companion matrix of the modulus") {
        Mat c = rep.phi(2);
        // x^4 + x + 1: subdiagonal ones, last column (1,1,0,0)
        Mat want(sub, 4, 4, {0, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0});
        REQUIRE(c == want);
    }
    SECTION("homomorphism") {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 50; ++i) {
            uint32_t a = (uint32_t)(rng() % 16), b = (uint32_t)(rng() % 16);
            REQUIRE(rep.phi(big->mul(a, b)) == rep.phi(a) * rep.phi(b));
            REQUIRE(rep.phi(big->add(a, b)) == rep.phi(a) + rep.phi(b));
        }
    }
    SECTION("coords round-trip") {
        for (uint32_t x = 0; x < 16; ++x) REQUIRE(rep.compose(rep.coords(x)) == x);
    }
}

TEST_CASE("regular representation over an intermediate field") {
    // GF(256) over GF(4): s = 4
    auto big = Field::make(2, 8);
    auto sub = Field::make(2, 2);
    RegularRep rep(big, sub);
    REQUIRE(rep.ext_degree() == 4);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        uint32_t a = (uint32_t)(rng() % 256), b = (uint32_t)(rng() % 256);
        REQUIRE(rep.phi(big->mul(a, b)) == rep.phi(a) * rep.phi(b));
    }
    REQUIRE(rep.phi(1) == Mat::identity(sub, 4));
}

TEST_CASE("phibar") {
    auto big = Field::make(2, 4);
    auto sub = Field::make(2, 1);
    RegularRep rep(big, sub);
    std::mt19937_64 rng(3);

    REQUIRE(rep.phibar(Mat::zero(big, 2, 2)).is_zero());
    REQUIRE(rep.phibar(Mat::identity(big, 2)) == Mat::identity(sub, 8));
    for (int i = 0; i < 25; ++i) {
        Mat a = random_mat(big, 2, 2, rng);
        REQUIRE(rep.phibar(a).rank() == 4 * a.rank());
        Mat b = random_mat(big, 2, 2, rng);
        REQUIRE(rep.phibar(a * b) == rep.phibar(a) * rep.phibar(b));
        REQUIRE(rep.phibar(a + b) == rep.phibar(a) + rep.phibar(b));
    }
}

TEST_CASE("psi") {
    auto big = Field::make(2, 4);
    std::mt19937_64 rng(4);
    SECTION("blocks repeat for matrices over the base field") {
        Mat a(big, 2, 2, {1, 0, 1, 1});
        Mat p = psi(a, 2);
        REQUIRE(p.rows() == 8);
        for (uint32_t j = 0; j < 4; ++j)
            for (uint32_t r = 0; r < 2; ++r)
                for (uint32_t c = 0; c < 2; ++c) REQUIRE(p.at(j * 2 + r, j * 2 + c) == a.at(r, c));
    }
    SECTION("psi(I) = I and rank scales") {
        REQUIRE(psi(Mat::identity(big, 2), 2) == Mat::identity(big, 8));
        for (int i = 0; i < 25; ++i) {
            Mat a = random_mat(big, 2, 2, rng);
            REQUIRE(psi(a, 2).rank() == 4 * a.rank());
        }
    }
}

TEST_CASE("Moore matrix") {
    auto big = Field::make(2, 4);
    SECTION("power basis gives an invertible Z") {
        Mat z = moore_matrix(big, 2, {1, 2, 4, 8});
        REQUIRE(z.invertible());
    }
    SECTION("dependent tuple is rejected") {
        // {1, theta, theta+1, theta^2} is F_2-dependent
        REQUIRE_THROWS_AS(moore_matrix(big, 2, {1, 2, 3, 4}), SingularMatrix);
    }
}

TEST_CASE("Dickson diagonalization: Z phi(a) Z^-1 = diag(a, a^q, ...)") {
    auto big = Field::make(2, 4);
    auto sub = Field::make(2, 1);
    RegularRep rep(big, sub);
    Mat z = moore_matrix(big, 2, {1, 2, 4, 8});
    Mat zi = z.inverse();
    const Embedding& emb = rep.embedding();
    for (uint32_t a = 0; a < 16; ++a) {
        Mat lhs = z * rep.phi(a).mapped(emb) * zi;
        Mat want(big, 4, 4);
        for (uint32_t i = 0; i < 4; ++i) want.at(i, i) = big->frobenius(2, a, i);
        REQUIRE(lhs == want);
    }
}

TEST_CASE("block permutation and the conjugation identity") {
    auto big = Field::make(2, 4);
    auto sub = Field::make(2, 1);
    RegularRep rep(big, sub);

    SECTION("n = 1 gives the identity permutation") {
        REQUIRE(block_perm(big, 1, 4) == Mat::identity(big, 4));
    }
    SECTION("P is a permutation matrix") {
        Mat p = block_perm(big, 2, 4);
        for (uint32_t i = 0; i < 8; ++i) {
            uint32_t row_ones = 0, col_ones = 0;
            for (uint32_t j = 0; j < 8; ++j) {
                if (p.at(i, j)) ++row_ones;
                if (p.at(j, i)) ++col_ones;
                REQUIRE((p.at(i, j) == 0 || p.at(i, j) == 1));
            }
            REQUIRE(row_ones == 1);
            REQUIRE(col_ones == 1);
        }
    }
    SECTION("(P Zbar) phibar(A) (P Zbar)^-1 = psi(A)") {
        Mat z = moore_matrix(big, 2, {1, 2, 4, 8});
        Mat zbar = Mat::identity(big, 2).kron(z);
        Mat pz = block_perm(big, 2, 4) * zbar;
        Mat pzi = pz.inverse();
        std::mt19937_64 rng(6);
        for (int i = 0; i < 100; ++i) {
            Mat a = random_mat(big, 2, 2, rng);
            REQUIRE(pz * rep.phibar(a).mapped(rep.embedding()) * pzi == psi(a, 2));
        }
    }
}

TEST_CASE("multiset rank identity on full subspaces") {
    auto big = Field::make(2, 4);
    auto sub = Field::make(2, 1);
    RegularRep rep(big, sub);
    std::mt19937_64 rng(8);
    // random F_2-subspaces of M_2(GF(16)) of dimension <= 8, full enumeration
    for (uint32_t dim = 1; dim <= 8; ++dim) {
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Mat> basis;
            std::vector<std::vector<uint32_t>> seen;  // crude independence via rank
            while (basis.size() < dim) {
                Mat cand = random_mat(big, 2, 2, rng);
                basis.push_back(cand);
                // build F_2 matrix of vec expansions to test independence
                Mat rows(sub, (uint32_t)basis.size(), 16);
                for (uint32_t r = 0; r < basis.size(); ++r) {
                    Mat v = basis[r].vec();
                    for (uint32_t t = 0; t < 4; ++t) {
                        const auto& cc = rep.coords(v.at(t, 0));
                        for (uint32_t b = 0; b < 4; ++b) rows.at(r, t * 4 + b) = cc[b];
                    }
                }
                if (rows.rank() != basis.size()) basis.pop_back();
            }
            std::map<uint32_t, uint32_t> ms_c, ms_phibar, ms_psi;
            for (uint32_t mask = 0; mask < (1u << dim); ++mask) {
                Mat m = Mat::zero(big, 2, 2);
                for (uint32_t b = 0; b < dim; ++b)
                    if ((mask >> b) & 1) m = m + basis[b];
                ++ms_c[4 * m.rank()];
                ++ms_phibar[rep.phibar(m).rank()];
                ++ms_psi[psi(m, 2).rank()];
            }
            REQUIRE(ms_c == ms_phibar);
            REQUIRE(ms_c == ms_psi);
        }
    }
}
