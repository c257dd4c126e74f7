#pragma once

#include <cmath>
#include <stdexcept>

namespace copeq {

/**
 * Upper tail P(X > x) for X chi-squared with one degree of freedom.
 * X = Z^2 with Z standard normal, so P(X > x) = erfc(sqrt(x/2)).
 */
inline double chi2_upper_tail(double x) {
    if (std::isnan(x)) throw std::invalid_argument("chi2_upper_tail: NaN");
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

} // namespace copeq
