#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "copeq/matrix.hpp"

namespace copeq {

/** Raw multivariate sample: n rows, p continuous margins. */
struct Sample {
    Matrix data;

    Sample() = default;
    explicit Sample(Matrix m) : data(std::move(m)) {}

    std::size_t n() const { return data.rows(); }
    std::size_t dim() const { return data.cols(); }
};

/** How margins with tied values are handled when ranking. */
enum class TiePolicy {
    Error,   ///< ties throw; margins are assumed continuous
    Average  ///< tied values receive the mean of the ranks they occupy
};

struct TiesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Rank-transformed sample. Entry (i,j) is rank(i,j)/n where ranks are 1-based
 * per column, so each untied column holds a permutation of {1/n, ..., 1}.
 *
 * `canonical` lists the row indices sorted lexicographically by row content.
 * Accumulations over rows follow this order so that results do not depend on
 * the order observations arrived in.
 */
struct PseudoSample {
    Matrix data;
    std::vector<std::size_t> canonical;
    bool had_ties = false;

    std::size_t n() const { return data.rows(); }
    std::size_t dim() const { return data.cols(); }
};

namespace detail {

inline std::vector<std::size_t> canonical_row_order(const Matrix& m) {
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(m.row(a), m.row(a) + m.cols(),
                                            m.row(b), m.row(b) + m.cols());
    });
    return idx;
}

} // namespace detail

/**
 * Column-wise pseudo-observations rank/n.
 *
 * Under TiePolicy::Error a tied column throws TiesError naming the column.
 * Under TiePolicy::Average tied entries share the midrank of their block.
 */
inline PseudoSample pseudo_observations(const Sample& sample,
                                        TiePolicy ties = TiePolicy::Error) {
    const std::size_t n = sample.n();
    const std::size_t p = sample.dim();
    if (n == 0) throw std::invalid_argument("pseudo_observations: empty sample");

    PseudoSample out;
    out.data = Matrix(n, p);

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < p; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return sample.data(a, j) < sample.data(b, j);
        });
        for (std::size_t r = 0; r < n;) {
            std::size_t r_end = r + 1;
            while (r_end < n &&
                   sample.data(order[r_end], j) == sample.data(order[r], j))
                ++r_end;
            if (r_end - r > 1) {
                if (ties == TiePolicy::Error)
                    throw TiesError("pseudo_observations: tied values in column " +
                                    std::to_string(j));
                out.had_ties = true;
            }
            // midrank of the tied block (equals r+1 when the block is a singleton)
            const double midrank =
                0.5 * static_cast<double>((r + 1) + r_end);
            for (std::size_t t = r; t < r_end; ++t)
                out.data(order[t], j) = midrank / static_cast<double>(n);
            r = r_end;
        }
    }
    out.canonical = detail::canonical_row_order(out.data);
    return out;
}

} // namespace copeq
