#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "copeq/ksample.hpp"
#include "copeq/rng.hpp"

namespace copeq {

struct TuningConfig {
    int k_prime = 3;       ///< sub-samples per replication
    int replications = 20;
    double grid_start = 0.25;
    double grid_step = 0.25;
    double grid_stop = 5.0;
    std::uint64_t seed = 0;
};

struct TuningResult {
    double alpha_hat = 0.0;
    bool grid_exhausted = false;  ///< no grid value was unanimous; largest returned
    std::vector<double> grid;
    std::vector<int> unanimous_count;  ///< replications with s = 1, per grid value
};

/**
 * Data-driven penalty constant. The K samples are pooled, and each
 * replication splits the pool at random into k_prime equal parts, which share
 * a copula by construction. alpha_hat is the smallest grid value whose
 * penalty makes the pair selection pick s = 1 in every replication.
 *
 * The count of s = 1 outcomes is nondecreasing along the grid, so the scan
 * stops at the first unanimous value.
 */
inline TuningResult tune_alpha(const std::vector<Sample>& samples,
                               const TestConfig& test_cfg,
                               const TuningConfig& cfg) {
    if (samples.empty()) throw std::invalid_argument("tune_alpha: no samples");
    if (cfg.k_prime < 2) throw std::invalid_argument("tune_alpha: k_prime must be >= 2");
    if (cfg.replications < 1) throw std::invalid_argument("tune_alpha: need replications");
    if (cfg.grid_step <= 0.0 || cfg.grid_start <= 0.0 || cfg.grid_stop < cfg.grid_start)
        throw std::invalid_argument("tune_alpha: bad grid");

    const std::size_t p = samples[0].dim();
    std::size_t total = 0;
    for (const auto& s : samples) {
        if (s.dim() != p) throw std::invalid_argument("tune_alpha: margin count mismatch");
        total += s.n();
    }
    const std::size_t kp = static_cast<std::size_t>(cfg.k_prime);
    const std::size_t m = total / kp;  // rows per sub-sample; remainder dropped
    if (m < 2) throw std::invalid_argument("tune_alpha: pooled sample too small");

    Matrix pool(total, p);
    {
        std::size_t r = 0;
        for (const auto& s : samples)
            for (std::size_t i = 0; i < s.n(); ++i, ++r)
                for (std::size_t c = 0; c < p; ++c)
                    pool(r, c) = s.data(i, c);
    }

    TuningResult out;
    for (double a = cfg.grid_start; a <= cfg.grid_stop + 1e-9; a += cfg.grid_step)
        out.grid.push_back(a);
    out.unanimous_count.assign(out.grid.size(), 0);

    const int n_pairs = pair_count(cfg.k_prime);
    const double n_eff = static_cast<double>(m);  // equal sub-sample sizes

    // log of the pair-penalty argument for the K'-sample rule; equals log m
    // for equal sizes in both pairing modes
    const double log_pair_arg = std::log(static_cast<double>(m));

    std::vector<std::size_t> perm(total);
    for (int rep = 0; rep < cfg.replications; ++rep) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = total; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);

        // coefficient discrepancy sequences of the k_prime sub-samples
        std::vector<CoefficientTable> tables;
        tables.reserve(kp);
        for (std::size_t s = 0; s < kp; ++s) {
            Matrix block(m, p);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t c = 0; c < p; ++c)
                    block(i, c) = pool(perm[s * m + i], c);
            PseudoSample ps = pseudo_observations(Sample(std::move(block)), test_cfg.ties);
            tables.push_back(coefficient_table(ps, test_cfg.d_max));
        }
        std::vector<std::vector<double>> v_seqs;
        v_seqs.reserve(static_cast<std::size_t>(n_pairs));
        for (int ell = 1; ell < cfg.k_prime; ++ell)
            for (int mm = ell + 1; mm <= cfg.k_prime; ++mm)
                v_seqs.push_back(detail::pair_sequence_from_tables(
                                     tables[ell - 1], tables[mm - 1],
                                     static_cast<double>(m), n_eff, ell, mm)
                                     .v_sequence);

        // only the selection step depends on alpha; rescan the cached sums
        for (std::size_t g = 0; g < out.grid.size(); ++g) {
            const double alpha = out.grid[g];
            std::vector<double> cumulative(v_seqs.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < v_seqs.size(); ++k) {
                const int d =
                    select_dimension(v_seqs[k], alpha, n_eff, test_cfg.d_max);
                acc += v_seqs[k][static_cast<std::size_t>(d) - 1];
                cumulative[k] = acc;
            }
            const int s = select_pair(cumulative, alpha * log_pair_arg);
            if (s == 1) out.unanimous_count[g] += 1;
        }
    }

    // a larger penalty can only shrink the selection, so unanimity is
    // monotone along the grid
    for (std::size_t g = 1; g < out.grid.size(); ++g)
        assert(out.unanimous_count[g] >= out.unanimous_count[g - 1]);

    out.alpha_hat = out.grid.back();
    out.grid_exhausted = true;
    for (std::size_t g = 0; g < out.grid.size(); ++g) {
        if (out.unanimous_count[g] == cfg.replications) {
            out.alpha_hat = out.grid[g];
            out.grid_exhausted = false;
            break;
        }
    }
    return out;
}

} // namespace copeq
