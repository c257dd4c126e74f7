#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "copeq/index_set.hpp"
#include "copeq/legendre.hpp"
#include "copeq/sample.hpp"

namespace copeq {

/**
 * Estimated projection coefficients of a copula on the tensor Legendre basis,
 * stored in shell order for all multi-indices with |j|_1 in [2, d_max].
 */
struct CoefficientTable {
    int dim = 0;
    int d_max = 0;
    std::vector<MultiIndex> indices;
    std::vector<double> values;

    double at(const MultiIndex& j) const {
        for (std::size_t k = 0; k < indices.size(); ++k)
            if (indices[k] == j) return values[k];
        throw std::out_of_range("CoefficientTable::at: index not in table");
    }
};

namespace detail {

// Per-row Legendre values for all margins, degrees 0..max_degree, evaluated
// once so every coefficient reuses them. Layout: row-major [margin][degree].
inline void row_basis(const PseudoSample& ps, std::size_t row, int max_degree,
                      std::vector<double>& buf) {
    const std::size_t p = ps.dim();
    buf.resize(p * (static_cast<std::size_t>(max_degree) + 1));
    for (std::size_t c = 0; c < p; ++c)
        legendre::eval_all(max_degree, ps.data(row, c),
                           std::span<double>(buf.data() + c * (max_degree + 1),
                                             static_cast<std::size_t>(max_degree) + 1));
}

inline double product_for_index(const MultiIndex& j, const double* basis,
                                int max_degree) {
    double prod = 1.0;
    for (std::size_t c = 0; c < j.size(); ++c) {
        if (j[c] == 0) continue;
        prod *= basis[c * (static_cast<std::size_t>(max_degree) + 1) +
                      static_cast<std::size_t>(j[c])];
    }
    return prod;
}

inline int max_entry(const MultiIndex& j) {
    int m = 0;
    for (int v : j) m = v > m ? v : m;
    return m;
}

} // namespace detail

/**
 * Sample coefficient (1/n) sum_i prod_c L_{j_c}(U_ic) over pseudo-observations.
 * Rows are accumulated in the sample's canonical order.
 */
inline double estimate_coefficient(const PseudoSample& ps, const MultiIndex& j) {
    if (j.size() != ps.dim())
        throw std::invalid_argument("estimate_coefficient: index dimension mismatch");
    for (int v : j)
        if (v < 0) throw std::invalid_argument("estimate_coefficient: negative degree");
    const int max_degree = detail::max_entry(j);
    std::vector<double> basis;
    double sum = 0.0;
    for (std::size_t i : ps.canonical) {
        detail::row_basis(ps, i, max_degree, basis);
        sum += detail::product_for_index(j, basis.data(), max_degree);
    }
    return sum / static_cast<double>(ps.n());
}

/** All shell coefficients up to total degree d_max, one pass over the rows. */
inline CoefficientTable coefficient_table(const PseudoSample& ps, int d_max) {
    if (d_max < 2) throw std::invalid_argument("coefficient_table: d_max must be >= 2");
    if (ps.dim() < 2) throw std::invalid_argument("coefficient_table: need >= 2 margins");
    CoefficientTable table;
    table.dim = static_cast<int>(ps.dim());
    table.d_max = d_max;
    table.indices = index_prefix(d_max, table.dim);
    table.values.assign(table.indices.size(), 0.0);

    // every index keeps >= 2 margins active, so single degrees stay <= d_max-1
    const int max_degree = d_max - 1;
    std::vector<double> basis;
    for (std::size_t i : ps.canonical) {
        detail::row_basis(ps, i, max_degree, basis);
        for (std::size_t k = 0; k < table.indices.size(); ++k)
            table.values[k] +=
                detail::product_for_index(table.indices[k], basis.data(), max_degree);
    }
    for (double& v : table.values) v /= static_cast<double>(ps.n());
    return table;
}

/**
 * Rank-based Spearman coefficient (3/n) sum_i (2U_i1 - 1)(2U_i2 - 1).
 * This is exactly the (1,1) projection coefficient.
 */
inline double spearman_rho(const PseudoSample& ps) {
    if (ps.dim() != 2)
        throw std::invalid_argument("spearman_rho: requires a bivariate sample");
    return estimate_coefficient(ps, MultiIndex{1, 1});
}

/** Truncated density expansion 1 + sum_j rho_j prod_c L_{j_c}(u_c). */
inline double density_series(const CoefficientTable& table, std::span<const double> u) {
    if (u.size() != static_cast<std::size_t>(table.dim))
        throw std::invalid_argument("density_series: dimension mismatch");
    const int max_degree = table.d_max - 1;
    std::vector<double> basis(u.size() * (static_cast<std::size_t>(max_degree) + 1));
    for (std::size_t c = 0; c < u.size(); ++c)
        legendre::eval_all(max_degree, u[c],
                           std::span<double>(basis.data() + c * (max_degree + 1),
                                             static_cast<std::size_t>(max_degree) + 1));
    double sum = 1.0;
    for (std::size_t k = 0; k < table.indices.size(); ++k)
        sum += table.values[k] *
               detail::product_for_index(table.indices[k], basis.data(), max_degree);
    return sum;
}

/**
 * Truncated copula expansion prod_c u_c + sum_j rho_j prod_c I_{j_c}(u_c),
 * where I_d is the antiderivative of L_d vanishing at 0 (I_0(u) = u).
 */
inline double copula_series(const CoefficientTable& table, std::span<const double> u) {
    if (u.size() != static_cast<std::size_t>(table.dim))
        throw std::invalid_argument("copula_series: dimension mismatch");
    const int max_degree = table.d_max - 1;
    std::vector<double> anti(u.size() * (static_cast<std::size_t>(max_degree) + 1));
    for (std::size_t c = 0; c < u.size(); ++c)
        for (int d = 0; d <= max_degree; ++d)
            anti[c * (max_degree + 1) + d] = legendre::antiderivative(d, u[c]);
    double base = 1.0;
    for (std::size_t c = 0; c < u.size(); ++c) base *= u[c];
    double sum = base;
    for (std::size_t k = 0; k < table.indices.size(); ++k) {
        double prod = 1.0;
        const MultiIndex& j = table.indices[k];
        for (std::size_t c = 0; c < j.size(); ++c)
            prod *= anti[c * (max_degree + 1) + j[c]];
        sum += table.values[k] * prod;
    }
    return sum;
}

} // namespace copeq
