#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "copeq/coefficients.hpp"
#include "copeq/rng.hpp"
#include "copeq/sample.hpp"

using copeq::CoefficientTable;
using copeq::MultiIndex;

namespace {

copeq::Sample random_sample(std::size_t n, std::size_t p, std::uint64_t seed) {
    copeq::Matrix m(n, p);
    copeq::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = rng.normal();
    return copeq::Sample(std::move(m));
}

copeq::PseudoSample from_ranks(const std::vector<std::vector<int>>& rank_cols) {
    const std::size_t n = rank_cols[0].size();
    copeq::Matrix m(n, rank_cols.size());
    for (std::size_t j = 0; j < rank_cols.size(); ++j)
        for (std::size_t i = 0; i < n; ++i)
            m(i, j) = static_cast<double>(rank_cols[j][i]);
    return copeq::pseudo_observations(copeq::Sample(std::move(m)));
}

} // namespace

TEST_CASE("constant index gives one", "[coeffs]") {
    const auto ps = copeq::pseudo_observations(random_sample(25, 2, 1));
    CHECK(copeq::estimate_coefficient(ps, {0, 0}) == 1.0);
}

TEST_CASE("comonotone three-point value", "[coeffs]") {
    const auto ps = from_ranks({{1, 2, 3}, {1, 2, 3}});
    CHECK_THAT(copeq::estimate_coefficient(ps, {1, 1}),
               Catch::Matchers::WithinAbs(11.0 / 9.0, 1e-14));
}

TEST_CASE("single active margin is data-free", "[coeffs]") {
    const auto a = copeq::pseudo_observations(random_sample(40, 2, 5));
    const auto b = copeq::pseudo_observations(random_sample(40, 2, 6));
    for (int m = 1; m <= 4; ++m) {
        const MultiIndex j{0, m};
        CHECK_THAT(copeq::estimate_coefficient(a, j),
                   Catch::Matchers::WithinAbs(copeq::estimate_coefficient(b, j), 1e-13));
        double direct = 0.0;
        for (int r = 1; r <= 40; ++r) direct += copeq::legendre::eval(m, r / 40.0);
        CHECK_THAT(copeq::estimate_coefficient(a, j),
                   Catch::Matchers::WithinAbs(direct / 40.0, 1e-12));
    }
}

TEST_CASE("table values equal the one-index estimator exactly", "[coeffs]") {
    for (int p = 2; p <= 3; ++p) {
        const auto ps =
            copeq::pseudo_observations(random_sample(30, static_cast<std::size_t>(p), 11));
        for (int d_max = 2; d_max <= 4; ++d_max) {
            const CoefficientTable table = copeq::coefficient_table(ps, d_max);
            CHECK(table.indices == copeq::index_prefix(d_max, p));
            for (std::size_t k = 0; k < table.indices.size(); ++k) {
                INFO("d_max=" << d_max << " p=" << p << " k=" << k);
                CHECK(table.values[k] ==
                      copeq::estimate_coefficient(ps, table.indices[k]));
                CHECK(table.at(table.indices[k]) == table.values[k]);
            }
        }
    }
}

TEST_CASE("row order does not change coefficients", "[coeffs]") {
    const auto s = random_sample(50, 3, 21);
    copeq::Matrix reversed(50, 3);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 3; ++j) reversed(i, j) = s.data(49 - i, j);

    const auto a = copeq::pseudo_observations(s);
    const auto b = copeq::pseudo_observations(copeq::Sample(std::move(reversed)));
    const auto ta = copeq::coefficient_table(a, 4);
    const auto tb = copeq::coefficient_table(b, 4);
    for (std::size_t k = 0; k < ta.values.size(); ++k)
        CHECK(ta.values[k] == tb.values[k]);
}

TEST_CASE("spearman hand values", "[coeffs]") {
    CHECK_THAT(copeq::spearman_rho(from_ranks({{1, 2, 3}, {1, 2, 3}})),
               Catch::Matchers::WithinAbs(11.0 / 9.0, 1e-14));
    CHECK_THAT(copeq::spearman_rho(from_ranks({{1, 2, 3}, {3, 2, 1}})),
               Catch::Matchers::WithinAbs(-5.0 / 9.0, 1e-14));
    CHECK_THAT(copeq::spearman_rho(from_ranks({{1, 2, 3}, {2, 3, 1}})),
               Catch::Matchers::WithinAbs(-1.0 / 9.0, 1e-14));
}

TEST_CASE("spearman is the (1,1) coefficient", "[coeffs]") {
    const auto ps = copeq::pseudo_observations(random_sample(64, 2, 31));
    CHECK(copeq::spearman_rho(ps) == copeq::estimate_coefficient(ps, {1, 1}));
    const auto ps3 = copeq::pseudo_observations(random_sample(10, 3, 31));
    CHECK_THROWS_AS(copeq::spearman_rho(ps3), std::invalid_argument);
}

TEST_CASE("spearman tracks the classical rank correlation", "[coeffs]") {
    // with ranks r_i of column 2 against 1..n the two versions satisfy
    // rho_hat = rho_classical (n^2-1)/n^2 + 3/n^2 exactly
    const std::size_t n = 200;
    copeq::Rng rng(77);
    std::vector<int> ranks(n);
    std::iota(ranks.begin(), ranks.end(), 1);
    for (std::size_t i = n; i > 1; --i)
        std::swap(ranks[i - 1], ranks[rng.below(i)]);

    std::vector<int> first(n);
    std::iota(first.begin(), first.end(), 1);
    const auto ps = from_ranks({first, ranks});

    const double c = (n + 1) / 2.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        cov += (static_cast<double>(i + 1) - c) * (ranks[i] - c);
    const double classical = cov / (n * (static_cast<double>(n) * n - 1.0) / 12.0);

    const double nn = static_cast<double>(n);
    CHECK_THAT(copeq::spearman_rho(ps),
               Catch::Matchers::WithinAbs(classical * (nn * nn - 1.0) / (nn * nn) +
                                              3.0 / (nn * nn),
                                          1e-12));
}

TEST_CASE("series expansions at fixed tables", "[coeffs]") {
    CoefficientTable flat;
    flat.dim = 2;
    flat.d_max = 2;
    flat.indices = {{1, 1}};
    flat.values = {0.0};
    const double u_half[] = {0.5, 0.5};
    CHECK(copeq::density_series(flat, u_half) == 1.0);
    CHECK_THAT(copeq::copula_series(flat, u_half),
               Catch::Matchers::WithinAbs(0.25, 1e-15));

    CoefficientTable t;
    t.dim = 2;
    t.d_max = 2;
    t.indices = {{1, 1}};
    t.values = {0.5};
    const double u_one[] = {1.0, 1.0};
    CHECK_THAT(copeq::density_series(t, u_one), Catch::Matchers::WithinAbs(2.5, 1e-13));
    CHECK_THAT(copeq::density_series(t, u_half), Catch::Matchers::WithinAbs(1.0, 1e-13));
    CHECK_THAT(copeq::copula_series(t, u_one), Catch::Matchers::WithinAbs(1.0, 1e-13));
    CHECK_THAT(copeq::copula_series(t, u_half),
               Catch::Matchers::WithinAbs(0.34375, 1e-13));
    const double u_zero[] = {0.0, 0.7};
    CHECK_THAT(copeq::copula_series(t, u_zero), Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("coefficient argument checks", "[coeffs]") {
    const auto ps = copeq::pseudo_observations(random_sample(10, 2, 3));
    CHECK_THROWS_AS(copeq::estimate_coefficient(ps, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(copeq::estimate_coefficient(ps, {-1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(copeq::coefficient_table(ps, 1), std::invalid_argument);
    const CoefficientTable t = copeq::coefficient_table(ps, 3);
    CHECK_THROWS_AS(t.at({7, 7}), std::out_of_range);
    const double pt[] = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(copeq::density_series(t, pt), std::invalid_argument);
}
