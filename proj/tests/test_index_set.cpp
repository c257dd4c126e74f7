#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "copeq/index_set.hpp"
#include "oracles.hpp"

using copeq::MultiIndex;

TEST_CASE("shells at small degree", "[index]") {
    CHECK(copeq::enumerate_shell(2, 2) == std::vector<MultiIndex>{{1, 1}});
    CHECK(copeq::enumerate_shell(3, 2) == std::vector<MultiIndex>{{2, 1}, {1, 2}});
    CHECK(copeq::enumerate_shell(2, 3) ==
          std::vector<MultiIndex>{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
}

TEST_CASE("shell enumeration matches exhaustive search", "[index]") {
    for (int p = 2; p <= 4; ++p) {
        for (int d = 2; d <= 6; ++d) {
            INFO("d=" << d << " p=" << p);
            CHECK(copeq::enumerate_shell(d, p) == oracle::shell_bruteforce(d, p));
        }
    }
}

TEST_CASE("shell cardinality", "[index]") {
    for (int p = 2; p <= 6; ++p) {
        for (int d = 2; d <= 8; ++d) {
            INFO("d=" << d << " p=" << p);
            CHECK(copeq::shell_cardinality(d, p) == oracle::shell_bruteforce(d, p).size());
            CHECK(copeq::enumerate_shell(d, p).size() == copeq::shell_cardinality(d, p));
        }
    }
    CHECK(copeq::shell_cardinality(2, 2) == 1);
    CHECK(copeq::shell_cardinality(3, 2) == 2);
    CHECK(copeq::shell_cardinality(2, 3) == 3);
}

TEST_CASE("cumulative sets walk the shells in order", "[index]") {
    CHECK(copeq::cumulative_set(1, 2) == std::vector<MultiIndex>{{1, 1}});
    CHECK(copeq::cumulative_set(3, 2) ==
          std::vector<MultiIndex>{{1, 1}, {2, 1}, {1, 2}});
    CHECK(copeq::cumulative_set(4, 3) ==
          std::vector<MultiIndex>{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {2, 1, 0}});

    // prefix of shells 2..d_max equals the cumulative set of its own length
    for (int p = 2; p <= 4; ++p) {
        for (int d_max = 2; d_max <= 5; ++d_max) {
            const auto& prefix = copeq::index_prefix(d_max, p);
            CHECK(prefix == copeq::cumulative_set(prefix.size(), p));
        }
    }
}

TEST_CASE("cumulative set members have bounded degree", "[index]") {
    for (int p = 2; p <= 4; ++p) {
        for (std::size_t k = 1; k <= 60; ++k) {
            const auto set = copeq::cumulative_set(k, p);
            REQUIRE(set.size() == k);
            int total = 0;
            for (int v : set.back()) total += v;
            INFO("p=" << p << " k=" << k << " last-degree=" << total);
            CHECK(total <= static_cast<int>(k) + 1);
        }
    }
}

TEST_CASE("pair ranking is the row-major upper triangle", "[index]") {
    CHECK(copeq::pair_rank(1, 2, 5) == 1);
    CHECK(copeq::pair_rank(1, 3, 5) == 2);
    for (int K = 2; K <= 12; ++K)
        CHECK(copeq::pair_rank(K - 1, K, K) == copeq::pair_count(K));
    CHECK(copeq::pair_unrank(5, 4) == std::make_pair(2, 4));
    CHECK(copeq::pair_unrank(6, 4) == std::make_pair(3, 4));
}

TEST_CASE("pair ranking is a bijection", "[index]") {
    for (int K = 2; K <= 12; ++K) {
        std::set<int> seen;
        for (int ell = 1; ell < K; ++ell) {
            for (int m = ell + 1; m <= K; ++m) {
                const int r = copeq::pair_rank(ell, m, K);
                CHECK(r >= 1);
                CHECK(r <= copeq::pair_count(K));
                CHECK(seen.insert(r).second);
                CHECK(copeq::pair_unrank(r, K) == std::make_pair(ell, m));
            }
        }
        CHECK(static_cast<int>(seen.size()) == copeq::pair_count(K));
    }
}

TEST_CASE("index arguments are validated", "[index]") {
    CHECK_THROWS_AS(copeq::shell_cardinality(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(copeq::shell_cardinality(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(copeq::enumerate_shell(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(copeq::cumulative_set(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(copeq::pair_rank(2, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(copeq::pair_rank(0, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(copeq::pair_unrank(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(copeq::pair_unrank(7, 4), std::invalid_argument);
}
