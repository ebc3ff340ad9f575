#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rmc/spreadset.hpp"

using namespace rmc;

TEST_CASE("desarguesian spread set at (2,2,4)") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode c = desarguesian_code(ctx);
    REQUIRE(c.dim() == 8);
    REQUIRE(is_semifield_code(c));
    // frozen canonical basis, from direct computation with GF(256) = 0x11D,
    // GF(16) = x^4 + x + 1, second basis vector = the GF(256) generator
    MatrixCode canon = canonical_basis(c);
    std::vector<std::vector<uint32_t>> want = {
        {1, 0, 0, 1},  {2, 0, 0, 2},  {4, 0, 0, 4},  {8, 0, 0, 8},
        {0, 1, 5, 2},  {0, 2, 10, 4}, {0, 4, 7, 8},  {0, 8, 14, 3},
    };
    for (uint32_t i = 0; i < 8; ++i) {
        const Mat& m = canon.basis()[i];
        REQUIRE(std::vector<uint32_t>{m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1)} == want[i]);
    }
}

TEST_CASE("desarguesian spread sets across parameters") {
    for (auto [q, n, s] : {std::tuple{2u, 2u, 1u}, {2u, 2u, 2u}, {2u, 3u, 1u}}) {
        auto ctx = CodeContext::make(q, n, s);
        MatrixCode c = desarguesian_code(ctx);
        REQUIRE(c.dim() == ctx->ns());
        REQUIRE(is_semifield_code(c));
    }
}

TEST_CASE("F_4 as a 2-dimensional spread set in M_2(F_2)") {
    auto ctx = CodeContext::make(2, 2, 1);
    MatrixCode c = desarguesian_code(ctx);
    REQUIRE(c.dim() == 2);
    auto sp = c.span();
    REQUIRE(sp.size() == 4);
    for (size_t i = 1; i < sp.size(); ++i) REQUIRE(sp[i].invertible());
}

TEST_CASE("a product with zero divisors is rejected") {
    auto ctx = CodeContext::make(2, 2, 1);
    // componentwise product on (F_2)^2 has zero divisors: (1,0)*(0,1) = 0
    MultFn bad = [&](const std::vector<uint32_t>& x, const std::vector<uint32_t>& y) {
        return std::vector<uint32_t>{x[0] & y[0], x[1] & y[1]};
    };
    REQUIRE_THROWS_AS(spread_from_mult(ctx, bad), FieldError);
}

TEST_CASE("non-left-linear products are rejected") {
    auto ctx = CodeContext::make(2, 2, 2);
    auto big = ctx->big_field();
    // frobenius twist on the left argument: additive but not F_4-linear
    MultFn twisted = [&](const std::vector<uint32_t>& x, const std::vector<uint32_t>& y) {
        return std::vector<uint32_t>{big->mul(big->frobenius(2, x[0], 1), y[0]),
                                     big->mul(big->frobenius(2, x[1], 1), y[1])};
    };
    REQUIRE_THROWS_AS(spread_from_mult(ctx, twisted), FieldError);
}

TEST_CASE("is_semifield_code") {
    auto ctx = CodeContext::make(2, 2, 4);
    auto big = ctx->big_field();
    SECTION("span containing a rank-1 matrix fails") {
        Mat a(big, 2, 2, {1, 0, 0, 0});
        MatrixCode c(ctx, {a});
        REQUIRE_FALSE(is_semifield_code(c));
    }
    SECTION("incremental agrees with full") {
        MatrixCode des = desarguesian_code(ctx);
        std::mt19937_64 rng(9);
        int checked = 0;
        while (checked < 30) {
            std::vector<Mat> partial(des.basis().begin(), des.basis().begin() + 3);
            MatrixCode c3(ctx, partial);
            Mat a(big, 2, 2);
            for (uint32_t i = 0; i < 2; ++i)
                for (uint32_t j = 0; j < 2; ++j) a.at(i, j) = (uint32_t)(rng() % 16);
            if (c3.contains(a)) continue;
            MatrixCode ext = c3.extended(a);
            REQUIRE(is_semifield_code_incremental(c3, a) == is_semifield_code(ext));
            ++checked;
        }
    }
}

TEST_CASE("canonical basis") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode des = desarguesian_code(ctx);
    MatrixCode c1 = canonical_basis(des);
    SECTION("idempotent") {
        MatrixCode c2 = canonical_basis(c1);
        for (uint32_t i = 0; i < 8; ++i) REQUIRE(c1.basis()[i] == c2.basis()[i]);
    }
    SECTION("independent of the input basis") {
        auto sp = des.span();
        std::vector<Mat> alt{sp[3], sp[5], sp[9], sp[17], sp[33], sp[65], sp[129], sp[254]};
        MatrixCode other(ctx, alt);
        REQUIRE(other.same_span(des));
        MatrixCode c3 = canonical_basis(other);
        for (uint32_t i = 0; i < 8; ++i) REQUIRE(c1.basis()[i] == c3.basis()[i]);
    }
    SECTION("prescribed first rows") {
        for (uint32_t k = 1; k <= 8; ++k) {
            auto row = ctx->prescribed_first_row(k);
            REQUIRE(c1.basis()[k - 1].at(0, 0) == row[0]);
            REQUIRE(c1.basis()[k - 1].at(0, 1) == row[1]);
        }
    }
    SECTION("partial codes get the echelon basis") {
        std::vector<Mat> partial(des.basis().begin(), des.basis().begin() + 3);
        MatrixCode c3(ctx, partial);
        MatrixCode e1 = canonical_basis(c3);
        MatrixCode e2 = canonical_basis(MatrixCode(ctx, {partial[2], partial[0], partial[1]}));
        for (uint32_t i = 0; i < 3; ++i) REQUIRE(e1.basis()[i] == e2.basis()[i]);
    }
}

TEST_CASE("first row index") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode des = desarguesian_code(ctx);
    FirstRowIndex idx(des);
    REQUIRE(idx.size() == 256);
    auto sp = des.span();
    for (const auto& m : sp) {
        REQUIRE(idx.contains(m));
        const Mat* found = idx.lookup_row({m.at(0, 0), m.at(0, 1)});
        REQUIRE(found != nullptr);
        REQUIRE(*found == m);
    }
    Mat fake = sp[1];
    fake.at(1, 0) = fake.at(1, 0) ^ 1;
    REQUIRE_FALSE(idx.contains(fake));
}

TEST_CASE("first-row map is a bijection for spread sets (exhaustive, s <= 4)") {
    for (uint32_t s : {1u, 2u, 4u}) {
        auto ctx = CodeContext::make(2, 2, s);
        MatrixCode des = desarguesian_code(ctx);
        REQUIRE_NOTHROW(FirstRowIndex(des));  // duplicate rows would throw
        REQUIRE(FirstRowIndex(des).size() == (size_t)1 << (2 * s));
    }
}

TEST_CASE("seed sets") {
    SECTION("(2,2,4): 8 sets of 240") {
        auto ctx = CodeContext::make(2, 2, 4);
        SeedSets seeds = seed_sets(ctx);
        REQUIRE(seeds.sets.size() == 8);
        for (auto& s : seeds.sets) REQUIRE(s.size() == 240);
        for (uint32_t k = 1; k <= 8; ++k) {
            auto row = ctx->prescribed_first_row(k);
            for (auto& m : seeds.sets[k - 1]) {
                REQUIRE(m.at(0, 0) == row[0]);
                REQUIRE(m.at(0, 1) == row[1]);
                REQUIRE(m.invertible());
            }
        }
    }
    SECTION("n = 1: singleton seed sets") {
        auto ctx = CodeContext::make(2, 1, 4);
        SeedSets seeds = seed_sets(ctx);
        REQUIRE(seeds.sets.size() == 4);
        for (uint32_t k = 1; k <= 4; ++k) {
            REQUIRE(seeds.sets[k - 1].size() == 1);
            REQUIRE(seeds.sets[k - 1][0].at(0, 0) ==
                    ctx->big_field()->pow(ctx->big_field()->generator(), k - 1));
        }
    }
}

TEST_CASE("extend/canonicalize commute at the span level") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode des = desarguesian_code(ctx);
    std::vector<Mat> partial(des.basis().begin(), des.basis().begin() + 4);
    MatrixCode c(ctx, partial);
    Mat a = des.basis()[4];
    MatrixCode e1 = canonical_basis(c.extended(a));
    MatrixCode e2 = canonical_basis(canonical_basis(c).extended(a));
    REQUIRE(e1.same_span(e2));
}
