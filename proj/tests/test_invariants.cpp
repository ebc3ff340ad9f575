#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rmc/classify.hpp"
#include "rmc/sampling.hpp"

using namespace rmc;

TEST_CASE("1-ranks of spread sets are {0^1, (ns)^(q^ns - 1)}") {
    for (uint32_t s : {1u, 2u, 4u}) {
        auto ctx = CodeContext::make(2, 2, s);
        MatrixCode des = desarguesian_code(ctx);
        RankMultiset rm = m_ranks_fast(des, 1);
        REQUIRE(rm.counts.size() == 2);
        REQUIRE(rm.counts.at(0) == 1);
        REQUIRE(rm.counts.at(ctx->ns()) == (uint64_t(1) << ctx->ns()) - 1);
    }
    std::mt19937_64 rng(61);
    auto ctx = CodeContext::make(2, 2, 4);
    for (int i = 0; i < 5; ++i) {
        MatrixCode c = random_spread_set(ctx, rng);
        RankMultiset rm = m_ranks_fast(c, 1);
        REQUIRE(rm.to_string() == "0:1,8:255");
    }
}

TEST_CASE("zero space") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode zero(ctx, {});
    REQUIRE(m_ranks_direct(zero, 2).to_string() == "0:1");
    REQUIRE(m_ranks_fast(zero, 2).to_string() == "0:1");
}

TEST_CASE("desarguesian 2-ranks at (2,2,4): frozen regression value") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode des = desarguesian_code(ctx);
    REQUIRE(m_ranks_fast(des, 2).to_string() == "0:1,4:510,8:65025");
}

TEST_CASE("fast equals direct on random subspaces") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        uint32_t dim = 1 + (uint32_t)(rng() % 8);
        MatrixCode c = random_subspace(ctx, dim, rng);
        REQUIRE(m_ranks_fast(c, 2) == m_ranks_direct(c, 2));
    }
    // the parameter grid from the module contract
    for (auto [s, m] : {std::pair{2u, 1u}, {2u, 2u}, {4u, 2u}}) {
        auto cx = CodeContext::make(2, 2, s);
        for (int trial = 0; trial < 10; ++trial) {
            uint32_t dim = 1 + (uint32_t)(rng() % (2 * s));
            MatrixCode c = random_subspace(cx, dim, rng);
            REQUIRE(m_ranks_fast(c, m) == m_ranks_direct(c, m));
        }
    }
    // (2,2,4,4) at dimensions where the direct span fits
    {
        auto cx = CodeContext::make(2, 2, 4);
        for (int trial = 0; trial < 5; ++trial) {
            uint32_t dim = 1 + (uint32_t)(rng() % 4);
            MatrixCode c = random_subspace(cx, dim, rng);
            REQUIRE(m_ranks_fast(c, 4) == m_ranks_direct(c, 4));
        }
    }
}

TEST_CASE("coefficients in F_q reduce to s * rank") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(71);
    MatrixCode c = random_subspace(ctx, 4, rng);
    // tuples with all entries in F_q = {0,1} inside F_4
    for (uint32_t mask = 0; mask < 16; ++mask) {
        std::vector<uint32_t> tuple(4);
        Mat sum = Mat::zero(ctx->big_field(), 2, 2);
        for (uint32_t i = 0; i < 4; ++i) {
            tuple[i] = (mask >> i) & 1;
            if (tuple[i]) sum = sum + c.basis()[i];
        }
        REQUIRE(m_rank_fast_single(c, 2, tuple) == 4 * sum.rank());
        REQUIRE(m_rank_direct_single(c, 2, tuple) == 4 * sum.rank());
    }
}

TEST_CASE("divisibility: for m | s every m-rank is divisible by s/m") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        MatrixCode c = random_subspace(ctx, 1 + (uint32_t)(rng() % 8), rng);
        for (uint32_t m : {1u, 2u, 4u}) {
            if (m == 4 && c.dim() > 4) continue;
            RankMultiset rm = m_ranks_fast(c, m);
            for (auto& [r, cnt] : rm.counts) REQUIRE(r % (4 / m) == 0);
        }
    }
}

TEST_CASE("packed rank engine matches the generic fast path") {
    std::mt19937_64 rng(79);
    for (uint32_t s : {1u, 2u, 4u}) {
        auto ctx = CodeContext::make(2, 2, s);
        for (uint32_t m : {1u, 2u}) {
            PackedRankEngine eng(ctx, m);
            for (int trial = 0; trial < 10; ++trial) {
                uint32_t dim = 1 + (uint32_t)(rng() % (2 * s));
                MatrixCode c = random_subspace(ctx, dim, rng);
                std::vector<uint32_t> bl;
                for (const auto& b : c.basis()) bl.push_back(eng.pack_embedded(b));
                REQUIRE(eng.multiset(bl) == m_ranks_fast(c, m));
            }
        }
    }
}

TEST_CASE("vector codes") {
    auto ctx = CodeContext::make(2, 2, 4);
    MatrixCode des = desarguesian_code(ctx);
    SECTION("desarguesian golden value") {
        VectorCode d = vector_code(des);
        REQUIRE(d.length() == 8);
        REQUIRE(d.dim() == 2);
        // frozen: rows (1, theta, theta^2, theta^3, 0,0,0,0) and its mirror
        std::vector<uint32_t> want{1, 2, 4, 8, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 4, 8};
        REQUIRE(d.generator_entries() == want);
    }
    SECTION("length and dimension bounds") {
        std::mt19937_64 rng(83);
        for (int i = 0; i < 20; ++i) {
            uint32_t dim = 1 + (uint32_t)(rng() % 8);
            MatrixCode c = random_subspace(ctx, dim, rng);
            VectorCode d = vector_code(c);
            REQUIRE(d.length() == dim);
            REQUIRE(d.dim() <= 4);
        }
    }
    SECTION("basis choice does not change the code") {
        auto sp = des.span();
        std::vector<Mat> alt{sp[3], sp[5], sp[9], sp[17], sp[33], sp[65], sp[129], sp[254]};
        MatrixCode other(ctx, alt);
        REQUIRE(other.same_span(des));
        // not necessarily equal generators (columns permute), but equivalent
        VectorCode d1 = vector_code(des), d2 = vector_code(other);
        REQUIRE(d1.dim() == d2.dim());
        auto w = vector_code_equivalent(d1, d2);
        REQUIRE(w.has_value());
    }
}

TEST_CASE("rank weight") {
    auto ctx = CodeContext::make(2, 2, 4);
    const auto& rep = ctx->rep();
    REQUIRE(rank_weight(rep, {0, 0, 0}) == 0);
    REQUIRE(rank_weight(rep, {1, 1, 1, 1}) == 1);
    REQUIRE(rank_weight(rep, {1, 2, 4, 8, 0, 0, 0, 0}) == 4);
}

TEST_CASE("vclass labels") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(89);
    VectorClassRegistry reg;
    MatrixCode des = desarguesian_code(ctx);
    VectorCode d = vector_code(des);
    int32_t l1 = reg.label(d);
    SECTION("same code twice gives the same label") { REQUIRE(reg.label(d) == l1); }
    SECTION("equivalent transforms give the same label") {
        for (int i = 0; i < 10; ++i) {
            Mat x = random_invertible(ctx->big_field(), 2, rng);
            Mat y = random_invertible(ctx->big_field(), 2, rng);
            FieldAut rho = random_automorphism(ctx->big_field(), rng);
            MatrixCode t = transformed_code(des, x, y, rho);
            REQUIRE(reg.label(vector_code(t)) == l1);
        }
        REQUIRE(reg.size() == 1);
    }
}

TEST_CASE("invariant_key is constant on equivalence classes") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(97);
    VectorClassRegistry reg;
    for (int trial = 0; trial < 10; ++trial) {
        MatrixCode c = random_spread_set(ctx, rng);
        InvariantKey k1 = invariant_key(c, reg);
        for (int i = 0; i < 5; ++i) {
            Mat x = random_invertible(ctx->big_field(), 2, rng);
            Mat y = random_invertible(ctx->big_field(), 2, rng);
            FieldAut rho = random_automorphism(ctx->big_field(), rng);
            InvariantKey k2 = invariant_key(transformed_code(c, x, y, rho), reg);
            REQUIRE(k1 == k2);
        }
    }
}

TEST_CASE("spread-set vector codes have no zero-weight nonzero codewords") {
    auto ctx = CodeContext::make(2, 2, 4);
    std::mt19937_64 rng(101);
    const auto& rep = ctx->rep();
    for (int trial = 0; trial < 5; ++trial) {
        MatrixCode c = random_spread_set(ctx, rng);
        VectorCode d = vector_code(c);
        // enumerate codewords over a couple of random F_16-combinations
        for (int t = 0; t < 50; ++t) {
            std::vector<uint32_t> w(d.length(), 0);
            bool nonzero = false;
            for (uint32_t r = 0; r < d.dim(); ++r) {
                uint32_t lam = (uint32_t)(rng() % 16);
                if (lam) nonzero = true;
                for (uint32_t j = 0; j < d.length(); ++j)
                    w[j] = ctx->big_field()->add(w[j],
                                                 ctx->big_field()->mul(lam, d.gen_at(r, j)));
            }
            if (!nonzero) continue;
            bool allzero = true;
            for (uint32_t v : w)
                if (v) allzero = false;
            if (!allzero) REQUIRE(rank_weight(rep, w) > 0);
        }
    }
}
