#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "copeq/chi_square.hpp"
#include "copeq/coefficients.hpp"
#include "copeq/index_set.hpp"
#include "copeq/legendre.hpp"
#include "copeq/sample.hpp"

namespace copeq {

enum class Pairing {
    Paired,      ///< rows are aligned across populations; equal sizes required
    Independent  ///< populations are mutually independent; sizes may differ
};

struct TestConfig {
    /// Depth of the scan: coefficients of total degree up to d_max enter the
    /// embedded sequence, and the truncation rule considers its first d_max
    /// entries.
    int d_max = 3;
    double alpha = 1.0;        ///< penalty constant (see tune_alpha)
    Pairing pairing = Pairing::Paired;
    double level = 0.05;
    TiePolicy ties = TiePolicy::Error;
};

/** Embedded discrepancy sequence for one population pair. */
struct PairStatistics {
    int ell = 1;
    int m = 2;
    double scale = 0.0;   ///< n, or n_l n_m / (n_l + n_m)
    double n_eff = 0.0;   ///< n, or 2 n_l n_m / (n_l + n_m)
    std::vector<double> v_sequence;  ///< nondecreasing partial sums
    int d_selected = 0;   ///< data-driven truncation, 1-based
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    bool degenerate = false;
    double sigma2 = 0.0;
    int s_selected = 0;                   ///< number of pair terms kept
    std::pair<int, int> selected_pair{0, 0};  ///< pair at the kept rank
    int k_populations = 0;
    int dim = 0;
    std::vector<std::size_t> sizes;
    double alpha = 0.0;
    double level = 0.0;
    int d_max = 0;
    Pairing pairing = Pairing::Paired;
    std::vector<PairStatistics> pairs;    ///< in pair-rank order
};

namespace detail {

// threshold below which an estimated variance is treated as exactly zero
inline constexpr double kDegenerateEps = 1e-12;

inline void check_dimensions(const PseudoSample& a, const PseudoSample& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("pair statistics: margin count mismatch");
    if (a.dim() < 2) throw std::invalid_argument("pair statistics: need >= 2 margins");
}

inline double pair_scale(std::size_t n1, std::size_t n2, Pairing pairing) {
    if (pairing == Pairing::Paired) {
        if (n1 != n2) throw std::invalid_argument("paired mode requires equal sizes");
        return static_cast<double>(n1);
    }
    const double a = static_cast<double>(n1), b = static_cast<double>(n2);
    return a * b / (a + b);
}

inline double pair_n_eff(std::size_t n1, std::size_t n2, Pairing pairing) {
    return pairing == Pairing::Paired ? static_cast<double>(n1)
                                      : 2.0 * pair_scale(n1, n2, pairing);
}

inline PairStatistics pair_sequence_from_tables(const CoefficientTable& t1,
                                                const CoefficientTable& t2,
                                                double scale, double n_eff,
                                                int ell, int m) {
    if (t1.indices.size() != t2.indices.size() || t1.dim != t2.dim)
        throw std::invalid_argument("pair statistics: coefficient tables differ in shape");
    PairStatistics ps;
    ps.ell = ell;
    ps.m = m;
    ps.scale = scale;
    ps.n_eff = n_eff;
    ps.v_sequence.resize(t1.values.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < t1.values.size(); ++k) {
        const double diff = t1.values[k] - t2.values[k];
        acc += scale * diff * diff;
        ps.v_sequence[k] = acc;
    }
    return ps;
}

// Influence terms M_i for margins (0,1) of one pseudo-sample. The two inner
// sums are suffix sums over the rows ordered by one margin, so the whole
// vector costs O(n log n).
inline std::vector<double> influence_terms(const PseudoSample& ps) {
    const std::size_t n = ps.n();
    if (ps.dim() < 2)
        throw std::invalid_argument("influence_terms: need >= 2 margins");
    const double sqrt3 = std::sqrt(3.0);
    const double w = 2.0 * sqrt3 / static_cast<double>(n);

    auto l1 = [&](double u) { return sqrt3 * (2.0 * u - 1.0); };

    // order rows by one margin (ties broken by canonical rank) and build
    // suffix sums of the companion margin's L1 values
    auto suffix_table = [&](std::size_t by_col, std::size_t other_col,
                            std::vector<std::size_t>& order,
                            std::vector<double>& suffix) {
        order.resize(n);
        std::vector<std::size_t> canon_pos(n);
        for (std::size_t r = 0; r < n; ++r) canon_pos[ps.canonical[r]] = r;
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (ps.data(a, by_col) != ps.data(b, by_col))
                return ps.data(a, by_col) < ps.data(b, by_col);
            return canon_pos[a] < canon_pos[b];
        });
        suffix.assign(n + 1, 0.0);
        for (std::size_t r = n; r-- > 0;)
            suffix[r] = suffix[r + 1] + l1(ps.data(order[r], other_col));
        // tied blocks share the suffix starting at the block head
        for (std::size_t r = 0; r < n;) {
            std::size_t r_end = r + 1;
            while (r_end < n &&
                   ps.data(order[r_end], by_col) == ps.data(order[r], by_col))
                ++r_end;
            for (std::size_t t = r + 1; t < r_end; ++t) suffix[t] = suffix[r];
            r = r_end;
        }
    };

    std::vector<std::size_t> order1, order2;
    std::vector<double> suffix1, suffix2;
    suffix_table(0, 1, order1, suffix1);
    suffix_table(1, 0, order2, suffix2);

    // position of each row in the sorted orders
    std::vector<std::size_t> pos1(n), pos2(n);
    for (std::size_t r = 0; r < n; ++r) {
        pos1[order1[r]] = r;
        pos2[order2[r]] = r;
    }

    double c1 = 0.0, c2 = 0.0;  // sum_k U_k1 L1(U_k2) and sum_k U_k2 L1(U_k1)
    for (std::size_t i : ps.canonical) {
        c1 += ps.data(i, 0) * l1(ps.data(i, 1));
        c2 += ps.data(i, 1) * l1(ps.data(i, 0));
    }

    std::vector<double> mvals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double term0 = l1(ps.data(i, 0)) * l1(ps.data(i, 1));
        const double term1 = w * (suffix1[pos1[i]] - c1);
        const double term2 = w * (suffix2[pos2[i]] - c2);
        mvals[i] = term0 + term1 + term2;
    }
    return mvals;
}

} // namespace detail

/**
 * Sequence of embedded scaled discrepancies between two populations:
 * entry k is scale * sum over the first k multi-indices of the squared
 * coefficient differences. Nondecreasing in k.
 */
inline PairStatistics pair_statistic_sequence(const PseudoSample& a,
                                              const PseudoSample& b,
                                              const TestConfig& cfg,
                                              int ell = 1, int m = 2) {
    detail::check_dimensions(a, b);
    const double scale = detail::pair_scale(a.n(), b.n(), cfg.pairing);
    const double n_eff = detail::pair_n_eff(a.n(), b.n(), cfg.pairing);
    const CoefficientTable t1 = coefficient_table(a, cfg.d_max);
    const CoefficientTable t2 = coefficient_table(b, cfg.d_max);
    return detail::pair_sequence_from_tables(t1, t2, scale, n_eff, ell, m);
}

/**
 * Data-driven truncation: the smallest maximizer of v_k - k * penalty over
 * k = 1..min(len, scan_cap), with penalty = alpha * log(n_eff). The embedded
 * sequence may extend past scan_cap for diagnostics; only the first scan_cap
 * candidates compete. Scanning a handful keeps the null statistic close to
 * its chi-squared limit while still reaching every low-order coefficient.
 */
inline int select_dimension(const std::vector<double>& v_sequence, double alpha,
                            double n_eff,
                            int scan_cap = std::numeric_limits<int>::max()) {
    if (v_sequence.empty())
        throw std::invalid_argument("select_dimension: empty sequence");
    if (scan_cap < 1) throw std::invalid_argument("select_dimension: scan_cap < 1");
    const std::size_t top =
        std::min(v_sequence.size(), static_cast<std::size_t>(scan_cap));
    const double q = alpha * std::log(n_eff);
    int best_k = 1;
    double best = v_sequence[0] - q;
    for (std::size_t k = 2; k <= top; ++k) {
        const double payoff = v_sequence[k - 1] - static_cast<double>(k) * q;
        if (payoff > best) {
            best = payoff;
            best_k = static_cast<int>(k);
        }
    }
    return best_k;
}

/**
 * Variance of the leading coefficient difference for aligned samples:
 * (1/n) sum_i (M_i1 - M_i2 - mean(M1) + mean(M2))^2 with the influence terms
 * M from both samples' first two margins.
 */
inline double variance_paired(const PseudoSample& a, const PseudoSample& b) {
    detail::check_dimensions(a, b);
    if (a.n() != b.n())
        throw std::invalid_argument("variance_paired: equal sizes required");
    const std::size_t n = a.n();
    const std::vector<double> m1 = detail::influence_terms(a);
    const std::vector<double> m2 = detail::influence_terms(b);

    // canonical order for the joint rows keeps the result independent of how
    // the aligned observations were listed
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto* ax = a.data.row(x);
        const auto* ay = a.data.row(y);
        if (!std::equal(ax, ax + a.dim(), ay))
            return std::lexicographical_compare(ax, ax + a.dim(), ay, ay + a.dim());
        const auto* bx = b.data.row(x);
        const auto* by = b.data.row(y);
        return std::lexicographical_compare(bx, bx + b.dim(), by, by + b.dim());
    });

    double mean = 0.0;
    for (std::size_t i : order) mean += m1[i] - m2[i];
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i : order) {
        const double d = m1[i] - m2[i] - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

/**
 * Variance of the leading coefficient difference for independent samples:
 * (1-a)/n1 * sum (M_i1 - mean)^2 + a/n2 * sum (M_i2 - mean)^2 with
 * a = n1/(n1+n2).
 */
inline double variance_independent(const PseudoSample& a, const PseudoSample& b) {
    detail::check_dimensions(a, b);
    const double n1 = static_cast<double>(a.n());
    const double n2 = static_cast<double>(b.n());
    const double w = n1 / (n1 + n2);

    auto centered_sum = [](const PseudoSample& ps, const std::vector<double>& m) {
        double mean = 0.0;
        for (std::size_t i : ps.canonical) mean += m[i];
        mean /= static_cast<double>(ps.n());
        double acc = 0.0;
        for (std::size_t i : ps.canonical) {
            const double d = m[i] - mean;
            acc += d * d;
        }
        return acc;
    };

    const std::vector<double> m1 = detail::influence_terms(a);
    const std::vector<double> m2 = detail::influence_terms(b);
    return (1.0 - w) / n1 * centered_sum(a, m1) + w / n2 * centered_sum(b, m2);
}

/**
 * Smallest maximizer of cumulative_v[k-1] - k * penalty over pair ranks k.
 * cumulative_v holds partial sums of the per-pair selected statistics in
 * pair-rank order.
 */
inline int select_pair(const std::vector<double>& cumulative_v, double penalty) {
    if (cumulative_v.empty()) throw std::invalid_argument("select_pair: empty sequence");
    int best_k = 1;
    double best = cumulative_v[0] - penalty;
    for (std::size_t k = 2; k <= cumulative_v.size(); ++k) {
        const double payoff = cumulative_v[k - 1] - static_cast<double>(k) * penalty;
        if (payoff > best) {
            best = payoff;
            best_k = static_cast<int>(k);
        }
    }
    return best_k;
}

namespace detail {

inline TestResult test_from_pseudo(const std::vector<const PseudoSample*>& pseudo,
                                   const std::vector<const CoefficientTable*>& tables,
                                   const TestConfig& cfg) {
    const int K = static_cast<int>(pseudo.size());
    if (K < 2) throw std::invalid_argument("ksample_test: need >= 2 populations");
    const std::size_t p = pseudo[0]->dim();
    for (const auto* ps : pseudo) {
        if (ps->dim() != p)
            throw std::invalid_argument("ksample_test: margin count mismatch");
        if (ps->n() < 2)
            throw std::invalid_argument("ksample_test: need >= 2 observations");
    }
    if (cfg.pairing == Pairing::Paired)
        for (const auto* ps : pseudo)
            if (ps->n() != pseudo[0]->n())
                throw std::invalid_argument("ksample_test: paired mode requires equal sizes");

    TestResult res;
    res.k_populations = K;
    res.dim = static_cast<int>(p);
    res.alpha = cfg.alpha;
    res.level = cfg.level;
    res.d_max = cfg.d_max;
    res.pairing = cfg.pairing;
    for (const auto* ps : pseudo) res.sizes.push_back(ps->n());

    // per-pair embedded sequences and truncations
    res.pairs.reserve(static_cast<std::size_t>(pair_count(K)));
    for (int ell = 1; ell < K; ++ell) {
        for (int m = ell + 1; m <= K; ++m) {
            const std::size_t n1 = pseudo[ell - 1]->n();
            const std::size_t n2 = pseudo[m - 1]->n();
            const double scale = pair_scale(n1, n2, cfg.pairing);
            const double n_eff = pair_n_eff(n1, n2, cfg.pairing);
            PairStatistics ps = pair_sequence_from_tables(
                *tables[ell - 1], *tables[m - 1], scale, n_eff, ell, m);
            ps.d_selected =
                select_dimension(ps.v_sequence, cfg.alpha, ps.n_eff, cfg.d_max);
            res.pairs.push_back(std::move(ps));
        }
    }

    // cumulative statistic across pairs at their selected truncations
    std::vector<double> cumulative(res.pairs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < res.pairs.size(); ++k) {
        const auto& pr = res.pairs[k];
        acc += pr.v_sequence[static_cast<std::size_t>(pr.d_selected) - 1];
        cumulative[k] = acc;
    }

    double pair_penalty;
    if (cfg.pairing == Pairing::Paired) {
        pair_penalty = cfg.alpha * std::log(static_cast<double>(pseudo[0]->n()));
    } else {
        double log_arg = (K - 1) * std::log(static_cast<double>(K));
        double total = 0.0;
        for (const auto* ps : pseudo) {
            log_arg += std::log(static_cast<double>(ps->n()));
            total += static_cast<double>(ps->n());
        }
        log_arg -= (K - 1) * std::log(total);
        pair_penalty = cfg.alpha * log_arg;
    }
    res.s_selected = select_pair(cumulative, pair_penalty);
    res.selected_pair = pair_unrank(res.s_selected, K);

    const double v_kept = cumulative[static_cast<std::size_t>(res.s_selected) - 1];
    res.sigma2 = cfg.pairing == Pairing::Paired
                     ? variance_paired(*pseudo[0], *pseudo[1])
                     : variance_independent(*pseudo[0], *pseudo[1]);

    if (res.sigma2 <= kDegenerateEps) {
        res.degenerate = true;
        if (v_kept <= kDegenerateEps) {
            res.statistic = 0.0;
            res.p_value = 1.0;
        } else {
            res.statistic = std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
        }
    } else {
        res.statistic = v_kept / res.sigma2;
        res.p_value = chi2_upper_tail(res.statistic);
    }
    res.reject = res.p_value < cfg.level;
    return res;
}

} // namespace detail

/** Run the test on already rank-transformed populations. */
inline TestResult ksample_test(const std::vector<PseudoSample>& pseudo,
                               const TestConfig& cfg) {
    std::vector<const PseudoSample*> pp;
    pp.reserve(pseudo.size());
    for (const auto& ps : pseudo) pp.push_back(&ps);
    std::vector<CoefficientTable> tables;
    tables.reserve(pseudo.size());
    for (const auto& ps : pseudo) tables.push_back(coefficient_table(ps, cfg.d_max));
    std::vector<const CoefficientTable*> tp;
    tp.reserve(tables.size());
    for (const auto& t : tables) tp.push_back(&t);
    return detail::test_from_pseudo(pp, tp, cfg);
}

/**
 * Test H0: all K populations share one copula. Rejects when the penalized
 * sum of pairwise coefficient discrepancies, normalized by the estimated
 * variance of the leading term, exceeds the chi-squared(1) critical value.
 */
inline TestResult ksample_test(const std::vector<Sample>& samples,
                               const TestConfig& cfg) {
    std::vector<PseudoSample> pseudo;
    pseudo.reserve(samples.size());
    for (const auto& s : samples) pseudo.push_back(pseudo_observations(s, cfg.ties));
    return ksample_test(pseudo, cfg);
}

/** All pairwise two-sample tests; entry (l,m) holds that pair's result. */
struct AnovaResult {
    int k_populations = 0;
    std::vector<TestResult> results;  ///< in pair-rank order

    const TestResult& at(int ell, int m) const {
        return results[static_cast<std::size_t>(pair_rank(ell, m, k_populations)) - 1];
    }
};

inline AnovaResult pairwise_anova(const std::vector<PseudoSample>& pseudo,
                                  const TestConfig& cfg) {
    const int K = static_cast<int>(pseudo.size());
    if (K < 2) throw std::invalid_argument("pairwise_anova: need >= 2 populations");
    std::vector<CoefficientTable> tables;
    tables.reserve(pseudo.size());
    for (const auto& ps : pseudo) tables.push_back(coefficient_table(ps, cfg.d_max));
    AnovaResult out;
    out.k_populations = K;
    for (int ell = 1; ell < K; ++ell) {
        for (int m = ell + 1; m <= K; ++m) {
            std::vector<const PseudoSample*> pp{&pseudo[ell - 1], &pseudo[m - 1]};
            std::vector<const CoefficientTable*> tp{&tables[ell - 1], &tables[m - 1]};
            out.results.push_back(detail::test_from_pseudo(pp, tp, cfg));
        }
    }
    return out;
}

inline AnovaResult pairwise_anova(const std::vector<Sample>& samples,
                                  const TestConfig& cfg) {
    std::vector<PseudoSample> pseudo;
    pseudo.reserve(samples.size());
    for (const auto& s : samples) pseudo.push_back(pseudo_observations(s, cfg.ties));
    return pairwise_anova(pseudo, cfg);
}

} // namespace copeq
