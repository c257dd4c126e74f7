#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace copeq {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/**
 * Derive an independent stream seed from a base seed and a stream index.
 * Replication r of an experiment seeded with s always uses derive_seed(s, r),
 * so results do not depend on scheduling.
 */
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(seed ^ detail::splitmix64(stream + 0x2545f4914f6cdd1dULL));
}

/** Deterministic generator with the variate transforms the samplers need. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(detail::splitmix64(seed)) {}

    /** Uniform on the open interval (0,1). */
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /** Standard normal (Marsaglia polar, spare cached). */
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /** Exponential with unit rate. */
    double exponential() { return -std::log(uniform()); }

    /** Gamma(shape, 1), Marsaglia-Tsang squeeze with the shape < 1 boost. */
    double gamma(double shape) {
        if (shape < 1.0) {
            // Gamma(a) = Gamma(a+1) * U^{1/a}; log form keeps tiny values finite
            const double u = uniform();
            return gamma(shape + 1.0) * std::exp(std::log(u) / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

    std::uint64_t raw() { return gen_(); }

    /** Uniform integer in [0, bound), bound >= 1 (for shuffles). */
    std::uint64_t below(std::uint64_t bound) {
        // rejection to kill modulo bias
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return r % bound;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace copeq
