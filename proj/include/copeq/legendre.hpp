#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace copeq::legendre {

/**
 * Shifted Legendre polynomials on [0,1], normalized to unit L2 norm:
 * L0 = 1, L1(u) = sqrt(3)(2u-1), and for n >= 1
 *   (n+1) L_{n+1}(u) = sqrt((2n+1)(2n+3)) (2u-1) L_n(u)
 *                      - n sqrt((2n+3)/(2n-1)) L_{n-1}(u).
 *
 * eval_all writes L_0(u), ..., L_max(u) into out (size max_degree+1).
 */
inline void eval_all(int max_degree, double u, std::span<double> out) {
    if (max_degree < 0) throw std::invalid_argument("eval_all: negative degree");
    if (out.size() < static_cast<std::size_t>(max_degree) + 1)
        throw std::invalid_argument("eval_all: output span too small");
    const double x = 2.0 * u - 1.0;
    out[0] = 1.0;
    if (max_degree == 0) return;
    out[1] = std::sqrt(3.0) * x;
    for (int n = 1; n < max_degree; ++n) {
        const double a = std::sqrt((2.0 * n + 1.0) * (2.0 * n + 3.0));
        const double b = n * std::sqrt((2.0 * n + 3.0) / (2.0 * n - 1.0));
        out[n + 1] = (a * x * out[n] - b * out[n - 1]) / (n + 1.0);
    }
}

inline std::vector<double> eval_all(int max_degree, double u) {
    std::vector<double> out(static_cast<std::size_t>(max_degree) + 1);
    eval_all(max_degree, u, out);
    return out;
}

inline double eval(int degree, double u) {
    std::vector<double> buf(static_cast<std::size_t>(degree) + 1);
    eval_all(degree, u, buf);
    return buf[static_cast<std::size_t>(degree)];
}

/**
 * Antiderivative vanishing at 0: returns int_0^u L_n(t) dt.
 *
 * For n >= 1 this reduces to a two-term expression in the neighbouring
 * polynomials,
 *   I_n(u) = ( L_{n+1}(u)/sqrt(2n+3) - L_{n-1}(u)/sqrt(2n-1) ) / (2 sqrt(2n+1)),
 * which vanishes at both endpoints. I_0(u) = u.
 */
inline double antiderivative(int degree, double u) {
    if (degree < 0) throw std::invalid_argument("antiderivative: negative degree");
    if (degree == 0) return u;
    std::vector<double> buf(static_cast<std::size_t>(degree) + 2);
    eval_all(degree + 1, u, buf);
    const double n = degree;
    return (buf[static_cast<std::size_t>(degree) + 1] / std::sqrt(2.0 * n + 3.0) -
            buf[static_cast<std::size_t>(degree) - 1] / std::sqrt(2.0 * n - 1.0)) /
           (2.0 * std::sqrt(2.0 * n + 1.0));
}

/** Product over coordinates of L_{index[c]}(point[c]). Skips degree-0 factors. */
inline double tensor_product(std::span<const int> index, std::span<const double> point) {
    if (index.size() != point.size())
        throw std::invalid_argument("tensor_product: dimension mismatch");
    double prod = 1.0;
    for (std::size_t c = 0; c < index.size(); ++c) {
        if (index[c] == 0) continue;
        prod *= eval(index[c], point[c]);
    }
    return prod;
}

} // namespace copeq::legendre
