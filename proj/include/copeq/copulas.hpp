#pragma once

#include <cmath>
#include <numbers>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "copeq/distributions.hpp"
#include "copeq/rng.hpp"
#include "copeq/sample.hpp"

namespace copeq {

enum class CopulaFamily { Gaussian, Student, Clayton, Gumbel, Frank, Joe };

/**
 * Exchangeable copula specification. The dependence strength is given as a
 * Kendall tau in (0,1) and converted to the family's natural parameter.
 * Student copulas additionally carry degrees of freedom.
 */
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Gaussian;
    double tau = 0.5;
    int dim = 2;
    double df = 4.0;  ///< Student only
};

namespace detail {

// Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt via 32-node
// Gauss-Legendre quadrature (nodes mapped from [-1,1]).
inline double debye1(double x) {
    static const double nodes[16] = {
        0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745,
        0.3318686022821276497, 0.4213512761306353453, 0.5068999089322293900,
        0.5877157572407623290, 0.6630442669302152009, 0.7321821187402896804,
        0.7944837959679424069, 0.8493676137325699701, 0.8963211557660521240,
        0.9349060759377396891, 0.9647622555875064307, 0.9856115115452683354,
        0.9972638618494815635};
    static const double weights[16] = {
        0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654,
        0.0911738786957638847, 0.0876520930044038111, 0.0833119242269467552,
        0.0781938957870703065, 0.0723457941088485062, 0.0658222227763618468,
        0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
        0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706,
        0.0070186100094700966};
    if (x == 0.0) return 1.0;
    auto f = [](double t) { return t <= 0.0 ? 1.0 : t / std::expm1(t); };
    double acc = 0.0;
    const double half = 0.5 * x;
    for (int i = 0; i < 16; ++i) {
        acc += weights[i] * (f(half * (1.0 + nodes[i])) + f(half * (1.0 - nodes[i])));
    }
    return 0.5 * acc;  // (1/x) * (x/2) * sum
}

inline double frank_tau_of_theta(double theta) {
    return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
}

// Kendall tau of the Joe copula via the series
// tau(theta) = 1 - 4 sum_{k>=1} 1 / (k (k theta + 2) (theta (k-1) + 2)),
// truncated with an integral tail correction.
inline double joe_tau_of_theta(double theta) {
    const int N = 200000;
    double sum = 0.0;
    for (int k = N; k >= 1; --k) {
        const double kd = k;
        sum += 1.0 / (kd * (kd * theta + 2.0) * (theta * (kd - 1.0) + 2.0));
    }
    // tail: ~ integral_N^inf dk / (theta^2 k^3) = 1 / (2 theta^2 N^2)
    sum += 1.0 / (2.0 * theta * theta * static_cast<double>(N) * static_cast<double>(N));
    return 1.0 - 4.0 * sum;
}

template <typename F>
inline double invert_increasing(F f, double target, double lo, double hi) {
    // f increasing; bracket then bisect
    double flo = f(lo), fhi = f(hi);
    while (fhi < target) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
        if (hi > 1e12) throw std::runtime_error("invert_increasing: no bracket");
    }
    (void)flo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/** Kendall tau of a family at a given natural parameter. */
inline double kendall_tau(CopulaFamily family, double theta) {
    switch (family) {
        case CopulaFamily::Gaussian:
        case CopulaFamily::Student:
            return 2.0 / std::numbers::pi * std::asin(theta);
        case CopulaFamily::Clayton:
            return theta / (theta + 2.0);
        case CopulaFamily::Gumbel:
            return 1.0 - 1.0 / theta;
        case CopulaFamily::Frank:
            return detail::frank_tau_of_theta(theta);
        case CopulaFamily::Joe:
            return detail::joe_tau_of_theta(theta);
    }
    throw std::logic_error("kendall_tau: unknown family");
}

/**
 * Natural parameter giving Kendall tau. Closed form where one exists,
 * bisection on the tau curve for Frank and Joe. tau must lie in (0,1).
 */
inline double tau_to_param(const CopulaSpec& spec) {
    const double tau = spec.tau;
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("tau_to_param: tau must lie in (0,1)");
    switch (spec.family) {
        case CopulaFamily::Gaussian:
        case CopulaFamily::Student:
            return std::sin(std::numbers::pi * tau / 2.0);
        case CopulaFamily::Clayton:
            return 2.0 * tau / (1.0 - tau);
        case CopulaFamily::Gumbel:
            return 1.0 / (1.0 - tau);
        case CopulaFamily::Frank:
            return detail::invert_increasing(
                [](double th) { return detail::frank_tau_of_theta(th); }, tau, 1e-6, 40.0);
        case CopulaFamily::Joe:
            return detail::invert_increasing(
                [](double th) { return detail::joe_tau_of_theta(th); }, tau, 1.0 + 1e-9, 40.0);
    }
    throw std::logic_error("tau_to_param: unknown family");
}

namespace detail {

// log of a positive stable variate with Laplace transform exp(-s^alpha),
// 0 < alpha < 1 (Kanter's representation); log form survives tiny alpha
inline double log_positive_stable(double alpha, Rng& rng) {
    const double u = std::numbers::pi * rng.uniform();
    const double w = rng.exponential();
    const double ratio = (1.0 - alpha) / alpha;
    return std::log(std::sin(alpha * u)) + ratio * std::log(std::sin((1.0 - alpha) * u)) -
           ratio * std::log(w) - (1.0 / alpha) * std::log(std::sin(u));
}

// logarithmic series variate, P(X = k) ~ p^k / k (Kemp's second algorithm)
inline double log_series(double p, Rng& rng) {
    const double h = std::log1p(-p);
    const double u2 = rng.uniform();
    if (u2 > p) return 1.0;
    const double u1 = rng.uniform();
    const double q = -std::expm1(u1 * h);
    if (u2 < q * q) {
        const double k = std::floor(1.0 + std::log(u2) / std::log(q));
        return k < 1.0 ? 1.0 : k;
    }
    return u2 > q ? 1.0 : 2.0;
}

// log of a Sibuya(alpha) variate, P(X >= n) = 1/(n^alpha ...): inversion of
// the tail approximation with an exact acceptance step near the mode
inline double log_sibuya(double alpha, Rng& rng) {
    const double u = rng.uniform();
    if (u <= alpha) return 0.0;  // X = 1
    const double log_gamma_1a = std::lgamma(1.0 - alpha);
    const double log_ginv = -(std::log1p(-u) + log_gamma_1a) / alpha;
    if (log_ginv > 52.0 * std::numbers::ln2) return log_ginv;  // beyond 1/eps: floor is identity
    const double ginv = std::exp(log_ginv);
    const double fginv = std::floor(ginv);
    // exact tail: P(X > n) = 1/(n B(n, 1-alpha))
    const double log_b = std::lgamma(fginv) + log_gamma_1a - std::lgamma(fginv + 1.0 - alpha);
    if (std::log1p(-u) < -std::log(fginv) - log_b) return std::log(std::ceil(ginv));
    return std::log(fginv);
}

} // namespace detail

/**
 * Draw n rows from the specified exchangeable copula; margins are uniform.
 * Gaussian/Student rows come from a one-factor elliptical representation,
 * Archimedean rows from their frailty mixture.
 */
inline Sample sample_copula(const CopulaSpec& spec, std::size_t n, std::uint64_t seed) {
    if (spec.dim < 2) throw std::invalid_argument("sample_copula: dim must be >= 2");
    if (n == 0) throw std::invalid_argument("sample_copula: n must be positive");
    const double theta = tau_to_param(spec);
    const std::size_t p = static_cast<std::size_t>(spec.dim);
    Matrix out(n, p);
    Rng rng(seed);

    switch (spec.family) {
        case CopulaFamily::Gaussian: {
            const double load = std::sqrt(theta);
            const double resid = std::sqrt(1.0 - theta);
            for (std::size_t i = 0; i < n; ++i) {
                const double z0 = rng.normal();
                for (std::size_t c = 0; c < p; ++c)
                    out(i, c) = normal_cdf(load * z0 + resid * rng.normal());
            }
            break;
        }
        case CopulaFamily::Student: {
            if (spec.df <= 0.0) throw std::invalid_argument("sample_copula: df must be positive");
            const double load = std::sqrt(theta);
            const double resid = std::sqrt(1.0 - theta);
            for (std::size_t i = 0; i < n; ++i) {
                const double z0 = rng.normal();
                const double scale = std::sqrt(rng.chi_squared(spec.df) / spec.df);
                for (std::size_t c = 0; c < p; ++c)
                    out(i, c) = student_t_cdf((load * z0 + resid * rng.normal()) / scale,
                                              spec.df);
            }
            break;
        }
        case CopulaFamily::Clayton: {
            // psi(t) = (1+t)^{-1/theta}, frailty Gamma(1/theta)
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rng.gamma(1.0 / theta);
                for (std::size_t c = 0; c < p; ++c) {
                    const double t = rng.exponential() / v;
                    out(i, c) = std::pow(1.0 + t, -1.0 / theta);
                }
            }
            break;
        }
        case CopulaFamily::Gumbel: {
            // psi(t) = exp(-t^{1/theta}), frailty positive stable(1/theta)
            const double alpha = 1.0 / theta;
            for (std::size_t i = 0; i < n; ++i) {
                const double log_v = detail::log_positive_stable(alpha, rng);
                for (std::size_t c = 0; c < p; ++c) {
                    const double log_t = std::log(rng.exponential()) - log_v;
                    out(i, c) = std::exp(-std::exp(alpha * log_t));
                }
            }
            break;
        }
        case CopulaFamily::Frank: {
            // psi(t) = -log(1-(1-e^{-theta}) e^{-t})/theta, log-series frailty
            const double pfr = -std::expm1(-theta);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = detail::log_series(pfr, rng);
                for (std::size_t c = 0; c < p; ++c) {
                    const double t = rng.exponential() / v;
                    out(i, c) = -std::log1p(-pfr * std::exp(-t)) / theta;
                }
            }
            break;
        }
        case CopulaFamily::Joe: {
            // psi(t) = 1-(1-e^{-t})^{1/theta}, Sibuya(1/theta) frailty
            const double alpha = 1.0 / theta;
            for (std::size_t i = 0; i < n; ++i) {
                const double log_v = detail::log_sibuya(alpha, rng);
                for (std::size_t c = 0; c < p; ++c) {
                    const double log_t = std::log(rng.exponential()) - log_v;
                    const double t = std::exp(log_t);
                    // 1 - (1 - e^{-t})^{alpha}, stable for both tails of t
                    out(i, c) = -std::expm1(alpha * std::log(-std::expm1(-t)));
                }
            }
            break;
        }
    }
    return Sample(std::move(out));
}

/** Parse "Gaus", "Stud", "Clay", "Gumb", "Fran", "Joe". */
inline CopulaFamily family_from_string(const std::string& name) {
    if (name == "Gaus" || name == "gaussian" || name == "Gaussian") return CopulaFamily::Gaussian;
    if (name == "Stud" || name == "student" || name == "Student") return CopulaFamily::Student;
    if (name == "Clay" || name == "clayton" || name == "Clayton") return CopulaFamily::Clayton;
    if (name == "Gumb" || name == "gumbel" || name == "Gumbel") return CopulaFamily::Gumbel;
    if (name == "Fran" || name == "frank" || name == "Frank") return CopulaFamily::Frank;
    if (name == "Joe" || name == "joe") return CopulaFamily::Joe;
    throw std::invalid_argument("unknown copula family: " + name);
}

inline std::string family_to_string(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Gaussian: return "Gaus";
        case CopulaFamily::Student: return "Stud";
        case CopulaFamily::Clayton: return "Clay";
        case CopulaFamily::Gumbel: return "Gumb";
        case CopulaFamily::Frank: return "Fran";
        case CopulaFamily::Joe: return "Joe";
    }
    return "?";
}

} // namespace copeq
