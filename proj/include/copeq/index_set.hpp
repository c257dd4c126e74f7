#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace copeq {

/** Multi-index of polynomial degrees, one entry per margin. */
using MultiIndex = std::vector<int>;

namespace detail {

inline std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;  // exact: r*(n-k+i) is divisible by i here
    }
    return r;
}

// Compositions of d into p nonnegative parts, first part descending, then
// recursively the same on the remainder. Indices with fewer than two positive
// parts are dropped: a single active margin carries no dependence information.
inline void enumerate_shell_into(int d, int p, MultiIndex& prefix,
                                 std::vector<MultiIndex>& out) {
    if (p == 1) {
        prefix.push_back(d);
        int active = 0;
        for (int v : prefix) active += (v > 0);
        if (active >= 2) out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = d; v >= 0; --v) {
        prefix.push_back(v);
        enumerate_shell_into(d - v, p - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace detail

/**
 * Number of degree-d multi-indices over p margins with at least two active
 * margins: C(d+p-1, p-1) - p for d >= 2 (all compositions minus the p
 * single-margin ones).
 */
inline std::size_t shell_cardinality(int d, int p) {
    if (d < 2 || p < 2) throw std::invalid_argument("shell_cardinality: need d >= 2, p >= 2");
    return detail::binomial(static_cast<std::size_t>(d + p - 1),
                            static_cast<std::size_t>(p - 1)) -
           static_cast<std::size_t>(p);
}

/**
 * The degree-d shell: multi-indices j with |j|_1 = d and >= 2 active margins,
 * ordered by descending first coordinate, then descending second, and so on.
 * Cached; the returned reference stays valid for the program lifetime.
 */
inline const std::vector<MultiIndex>& enumerate_shell(int d, int p) {
    if (d < 2 || p < 2) throw std::invalid_argument("enumerate_shell: need d >= 2, p >= 2");
    static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({d, p});
    if (it == cache.end()) {
        std::vector<MultiIndex> shell;
        MultiIndex prefix;
        detail::enumerate_shell_into(d, p, prefix, shell);
        it = cache.emplace(std::make_pair(d, p), std::move(shell)).first;
    }
    return it->second;
}

/**
 * All indices of the shells d = 2, ..., d_max concatenated in shell order.
 * This is the universe the embedded statistics walk through.
 */
inline const std::vector<MultiIndex>& index_prefix(int d_max, int p) {
    if (d_max < 2 || p < 2) throw std::invalid_argument("index_prefix: need d_max >= 2, p >= 2");
    static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({d_max, p});
    if (it == cache.end()) {
        std::vector<MultiIndex> all;
        for (int d = 2; d <= d_max; ++d) {
            const auto& shell = enumerate_shell(d, p);
            all.insert(all.end(), shell.begin(), shell.end());
        }
        it = cache.emplace(std::make_pair(d_max, p), std::move(all)).first;
    }
    return it->second;
}

/** First k indices across the shells S(2), S(3), ... */
inline std::vector<MultiIndex> cumulative_set(std::size_t k, int p) {
    if (k == 0) throw std::invalid_argument("cumulative_set: k must be positive");
    std::vector<MultiIndex> out;
    out.reserve(k);
    for (int d = 2; out.size() < k; ++d) {
        const auto& shell = enumerate_shell(d, p);
        for (const auto& j : shell) {
            out.push_back(j);
            if (out.size() == k) break;
        }
    }
    return out;
}

/**
 * Rank of the pair (ell, m), 1 <= ell < m <= K, in row-major upper-triangle
 * order: (1,2) -> 1, (1,3) -> 2, ..., (K-1,K) -> K(K-1)/2.
 */
inline int pair_rank(int ell, int m, int K) {
    if (!(1 <= ell && ell < m && m <= K))
        throw std::invalid_argument("pair_rank: need 1 <= ell < m <= K");
    return K * (ell - 1) - ell * (ell + 1) / 2 + m;
}

inline int pair_count(int K) { return K * (K - 1) / 2; }

/** Inverse of pair_rank. */
inline std::pair<int, int> pair_unrank(int rank, int K) {
    if (rank < 1 || rank > pair_count(K))
        throw std::invalid_argument("pair_unrank: rank out of range");
    for (int ell = 1; ell < K; ++ell) {
        const int last = pair_rank(ell, K, K);
        if (rank <= last) {
            const int m = rank - (K * (ell - 1) - ell * (ell + 1) / 2);
            return {ell, m};
        }
    }
    throw std::logic_error("pair_unrank: unreachable");
}

} // namespace copeq
