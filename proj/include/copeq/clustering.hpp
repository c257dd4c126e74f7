#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "copeq/ksample.hpp"

namespace copeq {

/** One accept/reject event in the greedy cluster construction. */
struct ClusterStep {
    std::vector<int> tested;  ///< populations in the test, ascending, 1-based
    double statistic = 0.0;
    double p_value = 1.0;
    bool accepted = false;
};

struct ClusterPartition {
    std::vector<std::vector<int>> clusters;  ///< 1-based population labels
    std::vector<ClusterStep> trail;
    bool no_cluster = false;  ///< the closest pair already tested different
};

/**
 * Greedy partition of the K populations into equal-copula clusters.
 *
 * Seeds a cluster at the pair with the smallest selected pairwise
 * discrepancy, then repeatedly offers the nearest unassigned population to
 * the current cluster and keeps it only while the simultaneous equality test
 * accepts. A rejection closes the cluster and opens a fresh one. If the very
 * first pair is rejected every population stays alone and no_cluster is set.
 */
inline ClusterPartition cluster_copulas(const std::vector<Sample>& samples,
                                        const TestConfig& cfg) {
    const int K = static_cast<int>(samples.size());
    if (K < 2) throw std::invalid_argument("cluster_copulas: need >= 2 populations");

    std::vector<PseudoSample> pseudo;
    pseudo.reserve(samples.size());
    for (const auto& s : samples) pseudo.push_back(pseudo_observations(s, cfg.ties));
    std::vector<CoefficientTable> tables;
    tables.reserve(pseudo.size());
    for (const auto& ps : pseudo) tables.push_back(coefficient_table(ps, cfg.d_max));

    // pairwise selected discrepancies used for seeding and candidate choice
    std::vector<std::vector<double>> dist(K, std::vector<double>(K, 0.0));
    for (int ell = 1; ell < K; ++ell) {
        for (int m = ell + 1; m <= K; ++m) {
            const std::size_t n1 = pseudo[ell - 1].n();
            const std::size_t n2 = pseudo[m - 1].n();
            PairStatistics pr = detail::pair_sequence_from_tables(
                tables[ell - 1], tables[m - 1],
                detail::pair_scale(n1, n2, cfg.pairing),
                detail::pair_n_eff(n1, n2, cfg.pairing), ell, m);
            pr.d_selected =
                select_dimension(pr.v_sequence, cfg.alpha, pr.n_eff, cfg.d_max);
            const double v = pr.v_sequence[static_cast<std::size_t>(pr.d_selected) - 1];
            dist[ell - 1][m - 1] = v;
            dist[m - 1][ell - 1] = v;
        }
    }

    auto run_test = [&](const std::vector<int>& members) {
        std::vector<const PseudoSample*> pp;
        std::vector<const CoefficientTable*> tp;
        for (int label : members) {
            pp.push_back(&pseudo[static_cast<std::size_t>(label) - 1]);
            tp.push_back(&tables[static_cast<std::size_t>(label) - 1]);
        }
        return detail::test_from_pseudo(pp, tp, cfg);
    };

    ClusterPartition out;
    std::vector<bool> assigned(static_cast<std::size_t>(K), false);
    int n_assigned = 0;

    // seed: closest unassigned pair
    auto seed_pair = [&]() {
        double best = std::numeric_limits<double>::infinity();
        std::pair<int, int> arg{0, 0};
        for (int ell = 1; ell < K; ++ell) {
            if (assigned[static_cast<std::size_t>(ell) - 1]) continue;
            for (int m = ell + 1; m <= K; ++m) {
                if (assigned[static_cast<std::size_t>(m) - 1]) continue;
                if (dist[ell - 1][m - 1] < best) {
                    best = dist[ell - 1][m - 1];
                    arg = {ell, m};
                }
            }
        }
        return arg;
    };

    std::vector<int> current;
    {
        const auto [ell, m] = seed_pair();
        const TestResult first = run_test({ell, m});
        out.trail.push_back({{ell, m}, first.statistic, first.p_value, !first.reject});
        if (first.reject) {
            // closest pair differs: no grouping is supported by the data
            out.no_cluster = true;
            return out;
        }
        current = {ell, m};
        assigned[static_cast<std::size_t>(ell) - 1] = true;
        assigned[static_cast<std::size_t>(m) - 1] = true;
        n_assigned = 2;
    }

    while (n_assigned < K) {
        // nearest unassigned population to the current cluster
        int candidate = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= K; ++j) {
            if (assigned[static_cast<std::size_t>(j) - 1]) continue;
            double d = std::numeric_limits<double>::infinity();
            for (int member : current)
                d = std::min(d, dist[j - 1][member - 1]);
            if (d < best) {
                best = d;
                candidate = j;
            }
        }

        std::vector<int> tested = current;
        tested.push_back(candidate);
        std::sort(tested.begin(), tested.end());
        const TestResult joint = run_test(tested);
        out.trail.push_back({tested, joint.statistic, joint.p_value, !joint.reject});

        if (!joint.reject) {
            current = tested;
        } else {
            out.clusters.push_back(current);
            current = {candidate};
        }
        assigned[static_cast<std::size_t>(candidate) - 1] = true;
        ++n_assigned;
    }
    out.clusters.push_back(current);
    return out;
}

} // namespace copeq
