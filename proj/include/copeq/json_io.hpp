#pragma once

#include <json.hpp>

#include "copeq/clustering.hpp"
#include "copeq/experiment.hpp"
#include "copeq/ksample.hpp"
#include "copeq/tuning.hpp"

namespace copeq {

inline nlohmann::json to_json(const PairStatistics& ps) {
    return {{"pair", {ps.ell, ps.m}},
            {"d_selected", ps.d_selected},
            {"v_sequence", ps.v_sequence}};
}

inline nlohmann::json to_json(const TestResult& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& ps : r.pairs) pairs.push_back(to_json(ps));
    return {{"statistic", r.statistic},
            {"p_value", r.p_value},
            {"reject", r.reject},
            {"degenerate", r.degenerate},
            {"sigma2", r.sigma2},
            {"s_selected", r.s_selected},
            {"selected_pair", {r.selected_pair.first, r.selected_pair.second}},
            {"k_populations", r.k_populations},
            {"dim", r.dim},
            {"sizes", r.sizes},
            {"alpha", r.alpha},
            {"level", r.level},
            {"d_max", r.d_max},
            {"pairing", r.pairing == Pairing::Paired ? "paired" : "independent"},
            {"pairs", pairs}};
}

inline nlohmann::json to_json(const ClusterPartition& part) {
    nlohmann::json trail = nlohmann::json::array();
    for (const auto& step : part.trail)
        trail.push_back({{"tested", step.tested},
                         {"statistic", step.statistic},
                         {"p_value", step.p_value},
                         {"accepted", step.accepted}});
    return {{"clusters", part.clusters},
            {"no_cluster", part.no_cluster},
            {"trail", trail}};
}

inline nlohmann::json to_json(const TuningResult& t) {
    return {{"alpha_hat", t.alpha_hat},
            {"grid_exhausted", t.grid_exhausted},
            {"grid", t.grid},
            {"unanimous_count", t.unanimous_count}};
}

inline nlohmann::json to_json(const ExperimentReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rep.rows)
        rows.push_back({{"scenario", row.scenario},
                        {"rate", row.rate},
                        {"se", row.se},
                        {"replications", row.replications}});
    return {{"design", rep.design_id},
            {"metric", rep.metric},
            {"seed", rep.seed},
            {"rows", rows}};
}

} // namespace copeq
