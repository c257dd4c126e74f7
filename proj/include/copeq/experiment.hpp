#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "copeq/clustering.hpp"
#include "copeq/copulas.hpp"
#include "copeq/ksample.hpp"
#include "copeq/rng.hpp"
#include "copeq/tuning.hpp"

namespace copeq {

/**
 * A Monte Carlo design: K populations with given copulas, one or more size
 * scenarios, optionally a tau sweep on one population, and either the
 * equality test (metric: rejection rate) or the clustering algorithm
 * (metric: fraction of runs recovering the expected grouping).
 */
struct ExperimentConfig {
    std::string design_id = "design";
    std::string mode = "test";  ///< "test" or "cluster"
    int p = 2;
    std::vector<CopulaSpec> copulas;
    std::vector<std::vector<std::size_t>> size_scenarios;  ///< each entry: K sizes
    int tau_sweep_pop = 0;  ///< 1-based population the sweep applies to; 0 = none
    std::vector<double> tau_sweep;
    int replications = 200;
    double level = 0.05;
    std::uint64_t seed = 1;
    Pairing pairing = Pairing::Paired;
    int d_max = 3;
    bool tune = true;     ///< choose the penalty constant per replication
    double alpha = 1.0;   ///< fixed penalty when tune is false
    TuningConfig tuning;
    TiePolicy ties = TiePolicy::Error;
    int expected_clusters = 0;
    std::vector<std::vector<int>> expected_partition;
};

struct ExperimentRow {
    std::string scenario;
    double rate = 0.0;
    double se = 0.0;
    int replications = 0;
};

struct ExperimentReport {
    std::string design_id;
    std::string metric;
    std::uint64_t seed = 0;
    std::vector<ExperimentRow> rows;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

/** Parse "Gaus(0.3)", "Stud(17,0.2)" and friends. */
inline CopulaSpec parse_copula_token(const std::string& token, int p) {
    const std::size_t open = token.find('(');
    const std::size_t close = token.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("bad copula token: " + token);
    CopulaSpec spec;
    spec.family = family_from_string(trim(token.substr(0, open)));
    spec.dim = p;
    const auto args = split(token.substr(open + 1, close - open - 1), ',');
    if (spec.family == CopulaFamily::Student) {
        if (args.size() != 2)
            throw std::invalid_argument("Stud needs (df,tau): " + token);
        spec.df = std::stod(args[0]);
        spec.tau = std::stod(args[1]);
    } else {
        if (args.size() != 1)
            throw std::invalid_argument(token + ": expected one argument");
        spec.tau = std::stod(args[0]);
    }
    return spec;
}

inline std::string scenario_label(const std::vector<std::size_t>& sizes,
                                  int sweep_pop, double sweep_tau) {
    std::ostringstream os;
    os << "n=";
    bool equal = true;
    for (std::size_t v : sizes) equal = equal && v == sizes[0];
    if (equal) {
        os << sizes[0];
    } else {
        for (std::size_t i = 0; i < sizes.size(); ++i)
            os << (i ? "/" : "") << sizes[i];
    }
    if (sweep_pop > 0) os << " tau" << sweep_pop << "=" << sweep_tau;
    return os.str();
}

inline std::vector<std::vector<int>> canonical_partition(
    std::vector<std::vector<int>> clusters) {
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    return clusters;
}

} // namespace detail

/** Parse the flat key = value design format (# starts a comment). */
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return {};
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("design_id"); !v.empty()) cfg.design_id = v;
    if (auto v = take("mode"); !v.empty()) {
        if (v != "test" && v != "cluster")
            throw std::invalid_argument("mode must be test or cluster");
        cfg.mode = v;
    }
    if (auto v = take("p"); !v.empty()) cfg.p = std::stoi(v);
    if (cfg.p < 2) throw std::invalid_argument("config: p must be >= 2");

    const std::string copulas = take("copulas");
    if (copulas.empty()) throw std::invalid_argument("config: copulas is required");
    for (const auto& token : detail::split(copulas, ';'))
        cfg.copulas.push_back(detail::parse_copula_token(token, cfg.p));
    if (cfg.copulas.size() < 2) throw std::invalid_argument("config: need >= 2 copulas");
    const std::size_t K = cfg.copulas.size();

    if (auto v = take("n_values"); !v.empty()) {
        for (const auto& tok : detail::split(v, ',')) {
            const long n = std::stol(tok);
            if (n < 2) throw std::invalid_argument("config: n must be >= 2");
            cfg.size_scenarios.emplace_back(K, static_cast<std::size_t>(n));
        }
    }
    if (auto v = take("sizes"); !v.empty()) {
        std::vector<std::size_t> sizes;
        for (const auto& tok : detail::split(v, ','))
            sizes.push_back(static_cast<std::size_t>(std::stol(tok)));
        if (sizes.size() != K)
            throw std::invalid_argument("config: sizes must list one entry per copula");
        cfg.size_scenarios.push_back(std::move(sizes));
    }
    if (cfg.size_scenarios.empty())
        throw std::invalid_argument("config: n_values or sizes is required");

    if (auto v = take("tau_sweep_pop"); !v.empty()) cfg.tau_sweep_pop = std::stoi(v);
    if (auto v = take("tau_sweep"); !v.empty())
        for (const auto& tok : detail::split(v, ',')) cfg.tau_sweep.push_back(std::stod(tok));
    if ((cfg.tau_sweep_pop > 0) != !cfg.tau_sweep.empty())
        throw std::invalid_argument("config: tau_sweep_pop and tau_sweep go together");
    if (cfg.tau_sweep_pop > static_cast<int>(K))
        throw std::invalid_argument("config: tau_sweep_pop out of range");

    if (auto v = take("replications"); !v.empty()) cfg.replications = std::stoi(v);
    if (cfg.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    if (auto v = take("level"); !v.empty()) cfg.level = std::stod(v);
    if (auto v = take("seed"); !v.empty()) cfg.seed = std::stoull(v);
    if (auto v = take("pairing"); !v.empty()) {
        if (v == "paired")
            cfg.pairing = Pairing::Paired;
        else if (v == "independent")
            cfg.pairing = Pairing::Independent;
        else
            throw std::invalid_argument("pairing must be paired or independent");
    }
    if (auto v = take("dmax"); !v.empty()) cfg.d_max = std::stoi(v);
    if (auto v = take("alpha"); !v.empty()) {
        if (v == "tune") {
            cfg.tune = true;
        } else {
            cfg.tune = false;
            cfg.alpha = std::stod(v);
        }
    }
    if (auto v = take("tune_replications"); !v.empty())
        cfg.tuning.replications = std::stoi(v);
    if (auto v = take("tune_kprime"); !v.empty()) cfg.tuning.k_prime = std::stoi(v);
    if (auto v = take("tune_grid"); !v.empty()) {
        const auto parts = detail::split(v, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("tune_grid must be start:step:stop");
        cfg.tuning.grid_start = std::stod(parts[0]);
        cfg.tuning.grid_step = std::stod(parts[1]);
        cfg.tuning.grid_stop = std::stod(parts[2]);
    }
    if (auto v = take("ties"); !v.empty()) {
        if (v == "error")
            cfg.ties = TiePolicy::Error;
        else if (v == "average")
            cfg.ties = TiePolicy::Average;
        else
            throw std::invalid_argument("ties must be error or average");
    }
    if (auto v = take("expected_clusters"); !v.empty())
        cfg.expected_clusters = std::stoi(v);
    if (auto v = take("expected_partition"); !v.empty()) {
        for (const auto& group : detail::split(v, '|')) {
            std::vector<int> members;
            for (const auto& tok : detail::split(group, ','))
                members.push_back(std::stoi(tok));
            cfg.expected_partition.push_back(std::move(members));
        }
        cfg.expected_partition = detail::canonical_partition(cfg.expected_partition);
    }

    if (!kv.empty())
        throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_experiment_config(in);
}

/**
 * Run the design. Replication r of scenario s always draws from streams
 * derived from (seed, s, r), so reports are reproducible byte for byte.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.mode == "cluster" && cfg.expected_clusters == 0 &&
        cfg.expected_partition.empty())
        throw std::invalid_argument(
            "cluster mode needs expected_clusters or expected_partition");

    ExperimentReport report;
    report.design_id = cfg.design_id;
    report.seed = cfg.seed;
    report.metric = cfg.mode == "test" ? "rejection_rate" : "cluster_match_rate";

    std::vector<double> sweep = cfg.tau_sweep;
    if (sweep.empty()) sweep.push_back(0.0);

    std::size_t scenario_idx = 0;
    for (const auto& sizes : cfg.size_scenarios) {
        for (double sweep_tau : sweep) {
            std::vector<CopulaSpec> specs = cfg.copulas;
            if (cfg.tau_sweep_pop > 0)
                specs[static_cast<std::size_t>(cfg.tau_sweep_pop) - 1].tau = sweep_tau;

            const std::uint64_t scenario_seed = derive_seed(cfg.seed, scenario_idx);
            int successes = 0;
            for (int rep = 0; rep < cfg.replications; ++rep) {
                const std::uint64_t rep_seed =
                    derive_seed(scenario_seed, static_cast<std::uint64_t>(rep));
                std::vector<Sample> samples;
                samples.reserve(specs.size());
                for (std::size_t k = 0; k < specs.size(); ++k)
                    samples.push_back(sample_copula(specs[k], sizes[k],
                                                    derive_seed(rep_seed, k + 1)));

                TestConfig tc;
                tc.d_max = cfg.d_max;
                tc.pairing = cfg.pairing;
                tc.level = cfg.level;
                tc.ties = cfg.ties;
                if (cfg.tune) {
                    TuningConfig tuning = cfg.tuning;
                    tuning.seed = derive_seed(rep_seed, 0x74756e65ULL);  // tuning stream
                    tc.alpha = tune_alpha(samples, tc, tuning).alpha_hat;
                } else {
                    tc.alpha = cfg.alpha;
                }

                if (cfg.mode == "test") {
                    if (ksample_test(samples, tc).reject) ++successes;
                } else {
                    const ClusterPartition part = cluster_copulas(samples, tc);
                    bool ok;
                    if (!cfg.expected_partition.empty())
                        ok = detail::canonical_partition(part.clusters) ==
                             cfg.expected_partition;
                    else
                        ok = static_cast<int>(part.clusters.size()) ==
                             cfg.expected_clusters;
                    if (ok) ++successes;
                }
            }
            const double rate =
                static_cast<double>(successes) / static_cast<double>(cfg.replications);
            ExperimentRow row;
            row.scenario = detail::scenario_label(sizes, cfg.tau_sweep_pop, sweep_tau);
            row.rate = rate;
            row.se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.replications));
            row.replications = cfg.replications;
            report.rows.push_back(std::move(row));
            ++scenario_idx;
        }
    }
    return report;
}

/** Render the report as CSV; rates and standard errors carry 4 decimals. */
inline std::string emit_report(const ExperimentReport& report) {
    std::ostringstream os;
    os << "design,scenario,metric,rate,se,replications,seed\n";
    char buf[32];
    for (const auto& row : report.rows) {
        os << report.design_id << ',' << row.scenario << ',' << report.metric << ',';
        std::snprintf(buf, sizeof buf, "%.4f", row.rate);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.4f", row.se);
        os << buf << ',' << row.replications << ',' << report.seed << '\n';
    }
    return os.str();
}

} // namespace copeq
