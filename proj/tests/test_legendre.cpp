#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "copeq/legendre.hpp"
#include "oracles.hpp"

using copeq::legendre::antiderivative;
using copeq::legendre::eval;
using copeq::legendre::eval_all;
using copeq::legendre::tensor_product;

TEST_CASE("low degrees match closed forms", "[legendre]") {
    const std::vector<double> grid{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
    for (double u : grid) {
        const auto L = eval_all(2, u);
        CHECK(L[0] == 1.0);
        CHECK_THAT(L[1], Catch::Matchers::WithinAbs(std::sqrt(3.0) * (2.0 * u - 1.0), 1e-14));
        CHECK_THAT(L[2], Catch::Matchers::WithinAbs(
                             std::sqrt(5.0) * (6.0 * u * u - 6.0 * u + 1.0), 1e-13));
    }
    CHECK_THAT(eval(2, 0.5), Catch::Matchers::WithinAbs(-std::sqrt(5.0) / 2.0, 1e-14));

    const auto at1 = eval_all(1, 1.0);
    CHECK(at1[0] == 1.0);
    CHECK_THAT(at1[1], Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-14));
    const auto at0 = eval_all(2, 0.0);
    CHECK_THAT(at0[1], Catch::Matchers::WithinAbs(-std::sqrt(3.0), 1e-14));
    CHECK_THAT(at0[2], Catch::Matchers::WithinAbs(std::sqrt(5.0), 1e-13));
}

TEST_CASE("orthonormal on the unit interval", "[legendre]") {
    // 64-node quadrature integrates these products exactly up to roundoff
    const auto q = oracle::gauss_legendre(64, 0.0, 1.0);
    constexpr int max_deg = 10;
    std::vector<std::vector<double>> vals(q.x.size());
    for (std::size_t i = 0; i < q.x.size(); ++i) vals[i] = eval_all(max_deg, q.x[i]);
    for (int a = 0; a <= max_deg; ++a) {
        for (int b = a; b <= max_deg; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < q.x.size(); ++i)
                acc += q.w[i] * vals[i][a] * vals[i][b];
            const double expect = a == b ? 1.0 : 0.0;
            INFO("a=" << a << " b=" << b);
            CHECK_THAT(acc, Catch::Matchers::WithinAbs(expect, 1e-10));
        }
    }
}

TEST_CASE("values respect the uniform bound", "[legendre]") {
    for (int n = 0; n <= 12; ++n) {
        const double bound = std::sqrt(2.0 * n + 1.0) * (1.0 + 1e-12);
        for (int i = 0; i <= 500; ++i) {
            const double u = i / 500.0;
            CHECK(std::fabs(eval(n, u)) <= bound);
        }
    }
}

TEST_CASE("antiderivative closed form", "[legendre]") {
    CHECK(antiderivative(0, 0.3) == 0.3);
    CHECK_THAT(antiderivative(1, 0.5),
               Catch::Matchers::WithinAbs(-std::sqrt(3.0) / 4.0, 1e-14));
    for (int n = 1; n <= 8; ++n) {
        INFO("degree " << n);
        CHECK_THAT(antiderivative(n, 0.0), Catch::Matchers::WithinAbs(0.0, 1e-13));
        CHECK_THAT(antiderivative(n, 1.0), Catch::Matchers::WithinAbs(0.0, 1e-13));
    }
}

TEST_CASE("antiderivative equals the integral", "[legendre]") {
    for (int n = 0; n <= 8; ++n) {
        for (double u : {0.2, 0.5, 0.77}) {
            const double ref =
                oracle::integrate([n](double t) { return eval(n, t); }, 0.0, u);
            INFO("degree " << n << " u " << u);
            CHECK_THAT(antiderivative(n, u), Catch::Matchers::WithinAbs(ref, 1e-12));
        }
    }
}

TEST_CASE("antiderivative derivative recovers the polynomial", "[legendre]") {
    const double h = 1e-5;
    for (int n = 0; n <= 6; ++n) {
        for (double u : {0.15, 0.4, 0.65, 0.85}) {
            const double fd = (antiderivative(n, u + h) - antiderivative(n, u - h)) / (2.0 * h);
            INFO("degree " << n << " u " << u);
            CHECK_THAT(fd, Catch::Matchers::WithinAbs(eval(n, u), 1e-6));
        }
    }
}

TEST_CASE("tensor products", "[legendre]") {
    {
        const int idx[] = {0, 0};
        const double pt[] = {0.3, 0.9};
        CHECK(tensor_product(idx, pt) == 1.0);
    }
    {
        const int idx[] = {1, 1};
        const double pt[] = {1.0, 1.0};
        CHECK_THAT(tensor_product(idx, pt), Catch::Matchers::WithinAbs(3.0, 1e-13));
    }
    {
        const int idx[] = {1, 2};
        const double pt[] = {0.5, 0.0};
        CHECK_THAT(tensor_product(idx, pt), Catch::Matchers::WithinAbs(0.0, 1e-13));
    }
    {
        const int idx[] = {1, 1, 2};
        const double pt[] = {0.2, 0.4, 0.8};
        const double expect = eval(1, 0.2) * eval(1, 0.4) * eval(2, 0.8);
        CHECK_THAT(tensor_product(idx, pt), Catch::Matchers::WithinAbs(expect, 1e-13));
    }
    {
        const int idx[] = {1, 1};
        const double pt[] = {0.5, 0.5, 0.5};
        CHECK_THROWS_AS(tensor_product(idx, pt), std::invalid_argument);
    }
}

TEST_CASE("argument checks", "[legendre]") {
    CHECK_THROWS_AS(eval_all(-1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(antiderivative(-2, 0.5), std::invalid_argument);
    std::vector<double> small(2);
    CHECK_THROWS_AS(eval_all(5, 0.5, std::span<double>(small)), std::invalid_argument);
}
