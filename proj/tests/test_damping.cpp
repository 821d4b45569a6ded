#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <normreg/damping.hpp>
#include <normreg/norms.hpp>

#include "support/testrand.hpp"

using namespace normreg;

namespace {

std::vector<double> rand_samples(std::size_t m, std::uint64_t seed, double scale) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i)
        v[i] = scale * testsupport::unit_double(testsupport::mix64(seed + i));
    return v;
}

DenseMatrix strict_upper_uniform(index_t n, std::uint64_t seed) {
    DenseMatrix T(n, n);
    std::uint64_t k = seed;
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j)
            T(i, j) = 2.0 * testsupport::unit_double(testsupport::mix64(k++)) - 1.0;
    return T;
}

} // namespace

TEST_CASE("build_quantile_ladder on a small hand-checked sample") {
    // m = 4, epsilon = 0.1: t = ceil(log2(K*4)) + 1 = 2
    const DampingPlan plan = build_quantile_ladder({4, 3, 2, 1}, 0.1, 4, 64.0);
    CHECK(plan.K == doctest::Approx(1.0 / std::log(10.0)));
    CHECK(plan.t == 2);
    REQUIRE(plan.qhat.size() == 4);
    CHECK(plan.qhat[0] == 0.0);
    CHECK(plan.qhat[1] == 3.0);  // 2nd largest, tail count 2 >= 4/2
    CHECK(plan.qhat[2] == 4.0);  // largest, tail count 1 >= 4/4
    CHECK(plan.qhat[3] == doctest::Approx(2.0 * plan.K * 4.0));
}

TEST_CASE("build_quantile_ladder with all-zero samples") {
    const DampingPlan plan = build_quantile_ladder(std::vector<double>(10, 0.0), 0.25, 100, 64.0);
    for (index_t k = 1; k <= plan.t; ++k) CHECK(plan.qhat[static_cast<std::size_t>(k)] == 0.0);
    CHECK(plan.qhat.back() > 0.0);
    // no threshold doubling is possible, so blocks step one by one
    REQUIRE(plan.blocks.size() == static_cast<std::size_t>(plan.t) + 2);
    for (std::size_t i = 0; i < plan.blocks.size(); ++i)
        CHECK(plan.blocks[i] == static_cast<index_t>(i));
}

TEST_CASE("build_quantile_ladder parameter validation") {
    const std::vector<double> s{1.0};
    CHECK_THROWS_AS(build_quantile_ladder(s, 0.0, 4, 64.0), ParameterError);
    CHECK_THROWS_AS(build_quantile_ladder(s, 0.7, 4, 64.0), ParameterError);
    CHECK_THROWS_AS(build_quantile_ladder({}, 0.1, 4, 64.0), ParameterError);
    CHECK_THROWS_AS(build_quantile_ladder(s, 0.1, 0, 64.0), ParameterError);
    CHECK_THROWS_AS(build_quantile_ladder(s, 0.1, 4, 0.5), ParameterError);
    CHECK_NOTHROW(build_quantile_ladder(s, 0.5, 4, 1.0));
}

TEST_CASE("ladder invariants on random samples") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto samples = rand_samples(200, 7000 + seed * 211, 10.0);
        const DampingPlan plan = build_quantile_ladder(samples, 0.1, 1000, 64.0);
        CHECK(plan.t >= 1);
        for (index_t k = 1; k < plan.t; ++k)
            CHECK(plan.qhat[static_cast<std::size_t>(k)] <=
                  plan.qhat[static_cast<std::size_t>(k) + 1]);
        REQUIRE(plan.blocks.front() == 0);
        REQUIRE(plan.blocks.back() == plan.t + 1);
        for (std::size_t i = 0; i + 1 < plan.blocks.size(); ++i) {
            CHECK(plan.blocks[i] < plan.blocks[i + 1]);
            const bool adjacent = plan.blocks[i + 1] == plan.blocks[i] + 1;
            const bool doubled =
                plan.qhat[static_cast<std::size_t>(plan.blocks[i + 1])] <
                2.0 * plan.qhat[static_cast<std::size_t>(plan.blocks[i])];
            CHECK((adjacent || doubled));
        }
    }
}

TEST_CASE("damp_row gives unit weights to all-zero rows") {
    const std::vector<double> zeros(16, 0.0);

    const DampingPlan generic = build_quantile_ladder(rand_samples(64, 42, 5.0), 0.1, 64, 64.0);
    RowWeights rw = damp_row(zeros, generic);
    for (double w : rw.W) CHECK(w == 1.0);
    for (index_t b : rw.block_of) CHECK(b == 0);

    // degenerate ladder: every finite threshold is zero
    const DampingPlan flat = build_quantile_ladder(std::vector<double>(64, 0.0), 0.1, 512, 64.0);
    rw = damp_row(zeros, flat);
    for (double w : rw.W) CHECK(w == 1.0);
    for (index_t b : rw.block_of) CHECK(b == 0);
}

TEST_CASE("damp_row weight formula and caps") {
    const DampingPlan plan = build_quantile_ladder({4, 3, 2, 1}, 0.1, 4, 64.0);
    // starts are {0, 3, cap}; a lone entry in a block with L*2^{-k}*n >= 1
    // keeps weight 1
    const std::vector<double> X{0.5, 3.2, 0.1, 0.0};
    const RowWeights rw = damp_row(X, plan);
    CHECK(rw.block_of[1] == 1);
    CHECK(rw.nu[1] == 1);
    CHECK(rw.W[1] == 1.0);
    CHECK(rw.block_of[0] == 0);
    CHECK(rw.W[0] == 1.0);

    // values at or beyond the cap land in the top block
    const std::vector<double> big{100.0};
    const RowWeights rb = damp_row(big, plan);
    CHECK(rb.block_of[0] == static_cast<index_t>(plan.blocks.size()) - 2);
}

TEST_CASE("per-block damped mass bound") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto samples = rand_samples(300, 9000 + seed * 97, 8.0);
        const DampingPlan plan = build_quantile_ladder(samples, 0.2, 400, 64.0);
        const auto X = rand_samples(128, 12345 + seed, 8.0);  // well below the cap
        const RowWeights rw = damp_row(X, plan);

        const std::size_t nblocks = plan.blocks.size() - 1;
        std::vector<double> mass(nblocks, 0.0);
        for (std::size_t j = 0; j < X.size(); ++j) {
            CHECK(rw.W[j] >= 0.0);
            CHECK(rw.W[j] <= 1.0);
            mass[static_cast<std::size_t>(rw.block_of[j])] += rw.W[j] * X[j];
        }
        for (std::size_t i = 0; i < nblocks; ++i) {
            const double rhs = plan.L_damp *
                               std::ldexp(static_cast<double>(X.size()),
                                          -static_cast<int>(plan.blocks[i])) *
                               plan.qhat[static_cast<std::size_t>(plan.blocks[i + 1])];
            CHECK(mass[i] <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("enlarging a block never raises its weight") {
    const auto samples = rand_samples(300, 31337, 8.0);
    const DampingPlan plan = build_quantile_ladder(samples, 0.2, 400, 64.0);
    std::vector<double> X = rand_samples(64, 999, 8.0);
    const RowWeights before = damp_row(X, plan);
    // duplicate the first entry; its block gains one member
    X.push_back(X.front());
    const RowWeights after = damp_row(X, plan);
    REQUIRE(after.block_of.back() == before.block_of.front());
    CHECK(after.W.front() <= before.W.front());
}

TEST_CASE("blocks and weights are scale-free below the cap") {
    const auto samples = rand_samples(200, 555, 1.0);
    auto X = rand_samples(80, 777, 1.0);
    const double c = 3.0;  // keeps everything far below the cap 2*K*n_ref
    auto samples2 = samples;
    auto X2 = X;
    for (double& v : samples2) v *= c;
    for (double& v : X2) v *= c;

    const DampingPlan p1 = build_quantile_ladder(samples, 0.1, 5000, 64.0);
    const DampingPlan p2 = build_quantile_ladder(samples2, 0.1, 5000, 64.0);
    CHECK(p1.blocks == p2.blocks);

    const RowWeights r1 = damp_row(X, p1);
    const RowWeights r2 = damp_row(X2, p2);
    CHECK(r1.block_of == r2.block_of);
    CHECK(r1.nu == r2.nu);
    CHECK(r1.W == r2.W);
}

TEST_CASE("column_products flags only heavily damped columns") {
    // one column large in every row forces its weight product down
    const index_t n = 32;
    DenseMatrix M(n, n);
    for (index_t i = 0; i < n; ++i) M(i, 5) = 4.0;
    // ladder drawn from sparse samples so the large value is an outlier
    std::vector<double> samples(1024, 0.0);
    for (std::size_t i = 0; i < 8; ++i) samples[i] = 16.0;
    const DampingPlan plan = build_quantile_ladder(samples, 0.1, n, 64.0);

    const ColumnProducts cp = column_products(M, plan);
    REQUIRE(cp.V.size() == static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j)
        if (j != 5) CHECK(cp.V[static_cast<std::size_t>(j)] == 1.0);
    CHECK((cp.J.empty() || cp.J.indices() == std::vector<index_t>{5}));
}

TEST_CASE("regularize_small_columns trivial and error cases") {
    CHECK(regularize_small_columns(DenseMatrix(0, 0), 0.1, 64.0).J0.empty());
    for (index_t n : {1, 2, 8, 17}) {
        const auto res = regularize_small_columns(DenseMatrix(n, n), 0.1, 64.0);
        CHECK(res.J0.empty());
        CHECK(res.diag.max_row_residual == 0.0);
    }

    DenseMatrix bad(3, 3);
    bad(1, 0) = 1.0;
    CHECK_THROWS_AS(regularize_small_columns(bad, 0.1, 64.0), ContractError);
    CHECK_THROWS_AS(regularize_small_columns(DenseMatrix(2, 3), 0.1, 64.0), ContractError);
    CHECK_THROWS_AS(regularize_small_columns(DenseMatrix(4, 4), 0.6, 64.0), ParameterError);
}

TEST_CASE("regularize_small_columns keeps a sparse unit matrix intact") {
    // one entry = 1 per row: counts are tiny against L*2^{-k}*n, so every
    // weight stays 1 and no column is removed
    const index_t n = 8;
    DenseMatrix T(n, n);
    for (index_t i = 0; i + 1 < n; ++i) T(i, i + 1 + (i % 2)) = 1.0;
    REQUIRE(T.is_strictly_upper_triangular());

    const auto res = regularize_small_columns(T, 0.1, 64.0);
    CHECK(res.J0.empty());
    CHECK(norm_2_to_inf(restrict_columns(T, res.J0.complement())) == doctest::Approx(1.0));
}

TEST_CASE("residual mass check holds on random upper triangles") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const index_t n = (seed % 2 == 0) ? 64 : 65;
        const DenseMatrix T = strict_upper_uniform(n, 8800 + seed * 131);
        const auto res = regularize_small_columns(T, 0.1, 64.0);
        CHECK(res.diag.max_row_residual <=
              std::exp(2.0) * res.diag.max_row_damped * (1.0 + 1e-9));
        CHECK(res.diag.v_min >= 0.0);
        CHECK(res.diag.v_max <= 1.0 + 1e-12);
        CHECK(res.diag.j0_size == res.J0.size());
    }
}

TEST_CASE("removed column budget stays small on uniform inputs") {
    const double eps = 0.1;
    const index_t n = 256;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DenseMatrix T = strict_upper_uniform(n, 17000 + seed * 59);
        const auto res = regularize_small_columns(T, eps, 64.0);
        CHECK(static_cast<double>(res.J0.size()) <= 2.0 * eps * static_cast<double>(n));
    }
}
