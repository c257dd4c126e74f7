#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "copeq/copulas.hpp"
#include "copeq/distributions.hpp"
#include "oracles.hpp"

using copeq::CopulaFamily;
using copeq::CopulaSpec;

namespace {

std::vector<double> column(const copeq::Sample& s, std::size_t j) {
    std::vector<double> out(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) out[i] = s.data(i, j);
    return out;
}

double uniform_ks(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - xs[i];
        const double lo = xs[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

} // namespace

TEST_CASE("regularized incomplete beta closed forms", "[copulas]") {
    for (double x : {0.0, 0.1, 0.35, 0.5, 0.75, 1.0}) {
        CHECK_THAT(copeq::reg_inc_beta(1.0, 1.0, x), Catch::Matchers::WithinAbs(x, 1e-13));
        const double quartic = 6 * x * x - 8 * x * x * x + 3 * x * x * x * x;
        CHECK_THAT(copeq::reg_inc_beta(2.0, 3.0, x),
                   Catch::Matchers::WithinAbs(quartic, 1e-12));
    }
    CHECK_THAT(copeq::reg_inc_beta(2.0, 2.0, 0.5), Catch::Matchers::WithinAbs(0.5, 1e-13));
}

TEST_CASE("student t cdf spot values", "[copulas]") {
    CHECK_THAT(copeq::student_t_cdf(0.0, 7.0), Catch::Matchers::WithinAbs(0.5, 1e-14));
    // one degree of freedom is the Cauchy law: F(1) = 3/4
    CHECK_THAT(copeq::student_t_cdf(1.0, 1.0), Catch::Matchers::WithinAbs(0.75, 1e-12));
    // tabulated 97.5% quantile of t(4)
    CHECK_THAT(copeq::student_t_cdf(2.776445105, 4.0),
               Catch::Matchers::WithinAbs(0.975, 1e-9));
    for (double t : {0.3, 1.7, 4.2})
        CHECK_THAT(copeq::student_t_cdf(-t, 5.0),
                   Catch::Matchers::WithinAbs(1.0 - copeq::student_t_cdf(t, 5.0), 1e-13));
    // high df approaches the normal law
    CHECK_THAT(copeq::student_t_cdf(1.959964, 1e7),
               Catch::Matchers::WithinAbs(0.975, 1e-5));
    CHECK_THAT(copeq::normal_cdf(1.959964), Catch::Matchers::WithinAbs(0.975, 1e-6));
}

TEST_CASE("tau to parameter closed forms", "[copulas]") {
    CHECK_THAT(copeq::tau_to_param({CopulaFamily::Gaussian, 0.5}),
               Catch::Matchers::WithinAbs(std::sin(std::numbers::pi / 4.0), 1e-15));
    CHECK(copeq::tau_to_param({CopulaFamily::Student, 0.5}) ==
          copeq::tau_to_param({CopulaFamily::Gaussian, 0.5}));
    CHECK_THAT(copeq::tau_to_param({CopulaFamily::Clayton, 0.5}),
               Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(copeq::tau_to_param({CopulaFamily::Gumbel, 0.8}),
               Catch::Matchers::WithinAbs(5.0, 1e-12));
    // Frank: theta for tau = 1/2 is near 5.7363
    CHECK_THAT(copeq::tau_to_param({CopulaFamily::Frank, 0.5}),
               Catch::Matchers::WithinAbs(5.7363, 2e-3));

    for (CopulaFamily fam : {CopulaFamily::Frank, CopulaFamily::Joe}) {
        for (double tau : {0.15, 0.5, 0.85}) {
            const double theta = copeq::tau_to_param({fam, tau});
            CHECK_THAT(copeq::kendall_tau(fam, theta),
                       Catch::Matchers::WithinAbs(tau, 1e-6));
        }
    }
    for (double bad : {0.0, 1.0, -0.2, 1.3})
        CHECK_THROWS_AS(copeq::tau_to_param({CopulaFamily::Gaussian, bad}),
                        std::invalid_argument);
}

TEST_CASE("kendall tau closed forms", "[copulas]") {
    CHECK_THAT(copeq::kendall_tau(CopulaFamily::Gaussian, std::sqrt(0.5)),
               Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(copeq::kendall_tau(CopulaFamily::Clayton, 2.0),
               Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(copeq::kendall_tau(CopulaFamily::Gumbel, 4.0),
               Catch::Matchers::WithinAbs(0.75, 1e-14));
}

TEST_CASE("family names round trip", "[copulas]") {
    for (CopulaFamily fam :
         {CopulaFamily::Gaussian, CopulaFamily::Student, CopulaFamily::Clayton,
          CopulaFamily::Gumbel, CopulaFamily::Frank, CopulaFamily::Joe})
        CHECK(copeq::family_from_string(copeq::family_to_string(fam)) == fam);
    CHECK(copeq::family_to_string(CopulaFamily::Gaussian) == "Gaus");
    CHECK_THROWS_AS(copeq::family_from_string("Banana"), std::invalid_argument);
}

TEST_CASE("sampling shape, range, determinism", "[copulas]") {
    const CopulaSpec spec{CopulaFamily::Gumbel, 0.6, 3};
    const auto s1 = copeq::sample_copula(spec, 200, 42);
    const auto s2 = copeq::sample_copula(spec, 200, 42);
    const auto s3 = copeq::sample_copula(spec, 200, 43);
    REQUIRE(s1.n() == 200);
    REQUIRE(s1.dim() == 3);
    bool identical = true, all_in_range = true;
    bool differs = false;
    for (std::size_t i = 0; i < 200; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            identical = identical && s1.data(i, j) == s2.data(i, j);
            differs = differs || s1.data(i, j) != s3.data(i, j);
            all_in_range = all_in_range && s1.data(i, j) > 0.0 && s1.data(i, j) < 1.0;
        }
    }
    CHECK(identical);
    CHECK(differs);
    CHECK(all_in_range);
}

TEST_CASE("samplers hit the requested kendall tau", "[copulas]") {
    const std::size_t n = 20000;
    std::uint64_t seed = 1000;
    for (CopulaFamily fam :
         {CopulaFamily::Gaussian, CopulaFamily::Student, CopulaFamily::Clayton,
          CopulaFamily::Gumbel, CopulaFamily::Frank, CopulaFamily::Joe}) {
        for (double tau : {0.3, 0.7}) {
            const auto s = copeq::sample_copula({fam, tau, 2}, n, seed++);
            const double emp = oracle::kendall_tau(column(s, 0), column(s, 1));
            INFO(copeq::family_to_string(fam) << " tau=" << tau);
            CHECK_THAT(emp, Catch::Matchers::WithinAbs(tau, 0.02));
        }
    }
}

TEST_CASE("margins are uniform", "[copulas]") {
    const std::size_t n = 20000;
    const double crit = 1.63 / std::sqrt(static_cast<double>(n));  // 1% KS critical value
    std::uint64_t seed = 2000;
    for (CopulaFamily fam :
         {CopulaFamily::Gaussian, CopulaFamily::Student, CopulaFamily::Clayton,
          CopulaFamily::Gumbel, CopulaFamily::Frank, CopulaFamily::Joe}) {
        const auto s = copeq::sample_copula({fam, 0.5, 2}, n, seed++);
        for (std::size_t j = 0; j < 2; ++j) {
            INFO(copeq::family_to_string(fam) << " margin " << j);
            CHECK(uniform_ks(column(s, j)) < crit);
        }
    }
    // Student with a different df keeps uniform margins too
    const auto st = copeq::sample_copula({CopulaFamily::Student, 0.2, 2, 17.0}, n, 2100);
    CHECK(uniform_ks(column(st, 0)) < crit);
    CHECK(uniform_ks(column(st, 1)) < crit);
}

TEST_CASE("extreme gumbel dependence stays stable", "[copulas]") {
    const auto s = copeq::sample_copula({CopulaFamily::Gumbel, 0.9999, 2}, 5000, 77);
    const double emp = oracle::kendall_tau(column(s, 0), column(s, 1));
    CHECK(emp > 0.995);
    for (std::size_t i = 0; i < s.n(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK((std::isfinite(s.data(i, j)) && s.data(i, j) > 0.0 && s.data(i, j) < 1.0));
}

TEST_CASE("higher dimensions are exchangeable in tau", "[copulas]") {
    // every coordinate pair shares the one-factor / frailty dependence
    const std::size_t n = 15000;
    for (CopulaFamily fam : {CopulaFamily::Gaussian, CopulaFamily::Clayton}) {
        const auto s = copeq::sample_copula({fam, 0.4, 3}, n, 3000);
        const double t12 = oracle::kendall_tau(column(s, 0), column(s, 1));
        const double t13 = oracle::kendall_tau(column(s, 0), column(s, 2));
        const double t23 = oracle::kendall_tau(column(s, 1), column(s, 2));
        INFO(copeq::family_to_string(fam));
        CHECK_THAT(t12, Catch::Matchers::WithinAbs(0.4, 0.025));
        CHECK_THAT(t13, Catch::Matchers::WithinAbs(0.4, 0.025));
        CHECK_THAT(t23, Catch::Matchers::WithinAbs(0.4, 0.025));
    }
}

TEST_CASE("sampler argument checks", "[copulas]") {
    CHECK_THROWS_AS(copeq::sample_copula({CopulaFamily::Gaussian, 0.5, 1}, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(copeq::sample_copula({CopulaFamily::Gaussian, 0.5, 2}, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(copeq::sample_copula({CopulaFamily::Student, 0.5, 2, 0.0}, 10, 1),
                    std::invalid_argument);
}
