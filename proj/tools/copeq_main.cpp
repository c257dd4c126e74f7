// copeq: rank-based K-sample copula equality testing from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric degeneracy.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "copeq/copeq.hpp"
#include "copeq/json_io.hpp"

namespace {

struct CommonOpts {
    std::vector<std::string> files;
    std::string group_col;
    std::string alpha = "tune";
    double level = 0.05;
    int d_max = 3;
    std::string pairing = "paired";
    std::string ties = "error";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts& o, bool many_files) {
    auto* files = sub->add_option("files", o.files,
                                  many_files ? "CSV files, one per population, or a "
                                               "single file with --group-col"
                                             : "CSV file");
    files->required();
    if (!many_files) files->expected(1);
    if (many_files)
        sub->add_option("--group-col", o.group_col,
                        "label column splitting one CSV into populations");
    sub->add_option("--alpha", o.alpha, "penalty constant, a number or 'tune'")
        ->capture_default_str();
    sub->add_option("--level", o.level, "test level")->capture_default_str();
    sub->add_option("--dmax", o.d_max, "largest projection dimension scanned")
        ->capture_default_str();
    sub->add_option("--pairing", o.pairing, "paired or independent")
        ->check(CLI::IsMember({"paired", "independent"}))
        ->capture_default_str();
    sub->add_option("--ties", o.ties, "tie handling: error or average")
        ->check(CLI::IsMember({"error", "average"}))
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "seed for the tuning sub-sampler")
        ->capture_default_str();
}

struct LoadedData {
    std::vector<copeq::Sample> samples;
    std::vector<std::string> labels;
};

LoadedData load_inputs(const CommonOpts& o) {
    LoadedData data;
    if (!o.group_col.empty()) {
        if (o.files.size() != 1)
            throw std::invalid_argument("--group-col takes exactly one CSV file");
        auto [samples, labels] = copeq::load_csv_groups(o.files[0], o.group_col);
        data.samples = std::move(samples);
        data.labels = std::move(labels);
        return data;
    }
    for (const auto& path : o.files) {
        data.samples.push_back(copeq::load_csv_sample(path));
        data.labels.push_back(path);
    }
    return data;
}

copeq::TestConfig make_test_config(const CommonOpts& o) {
    copeq::TestConfig cfg;
    cfg.d_max = o.d_max;
    cfg.level = o.level;
    cfg.pairing = o.pairing == "paired" ? copeq::Pairing::Paired
                                        : copeq::Pairing::Independent;
    cfg.ties = o.ties == "error" ? copeq::TiePolicy::Error : copeq::TiePolicy::Average;
    return cfg;
}

// resolves --alpha, running the tuner when requested
double resolve_alpha(const CommonOpts& o, const std::vector<copeq::Sample>& samples,
                     const copeq::TestConfig& cfg) {
    if (o.alpha != "tune") return std::stod(o.alpha);
    copeq::TuningConfig tuning;
    tuning.seed = o.seed;
    return copeq::tune_alpha(samples, cfg, tuning).alpha_hat;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int run_test(const CommonOpts& o) {
    const auto data = load_inputs(o);
    copeq::TestConfig cfg = make_test_config(o);
    cfg.alpha = resolve_alpha(o, data.samples, cfg);
    const auto res = copeq::ksample_test(data.samples, cfg);
    nlohmann::json j = copeq::to_json(res);
    j["labels"] = data.labels;
    print_json(j);
    return res.degenerate ? 3 : 0;
}

int run_anova(const CommonOpts& o) {
    const auto data = load_inputs(o);
    copeq::TestConfig cfg = make_test_config(o);
    cfg.alpha = resolve_alpha(o, data.samples, cfg);
    const auto anova = copeq::pairwise_anova(data.samples, cfg);
    nlohmann::json pairs = nlohmann::json::array();
    bool any_degenerate = false;
    for (int ell = 1; ell < anova.k_populations; ++ell) {
        for (int m = ell + 1; m <= anova.k_populations; ++m) {
            const auto& r = anova.at(ell, m);
            nlohmann::json entry = copeq::to_json(r);
            entry["populations"] = {data.labels[static_cast<std::size_t>(ell) - 1],
                                    data.labels[static_cast<std::size_t>(m) - 1]};
            pairs.push_back(std::move(entry));
            any_degenerate = any_degenerate || r.degenerate;
        }
    }
    nlohmann::json j;
    j["labels"] = data.labels;
    j["alpha"] = cfg.alpha;
    j["pairs"] = std::move(pairs);
    print_json(j);
    return any_degenerate ? 3 : 0;
}

int run_cluster(const CommonOpts& o) {
    const auto data = load_inputs(o);
    copeq::TestConfig cfg = make_test_config(o);
    cfg.alpha = resolve_alpha(o, data.samples, cfg);
    const auto part = copeq::cluster_copulas(data.samples, cfg);
    nlohmann::json j = copeq::to_json(part);
    j["labels"] = data.labels;
    j["alpha"] = cfg.alpha;
    nlohmann::json named = nlohmann::json::array();
    for (const auto& cluster : part.clusters) {
        nlohmann::json group = nlohmann::json::array();
        for (int pop : cluster)
            group.push_back(data.labels[static_cast<std::size_t>(pop) - 1]);
        named.push_back(std::move(group));
    }
    j["cluster_labels"] = std::move(named);
    print_json(j);
    return 0;
}

int run_tune(const CommonOpts& o, int k_prime, int reps, const std::string& grid) {
    const auto data = load_inputs(o);
    const copeq::TestConfig cfg = make_test_config(o);
    copeq::TuningConfig tuning;
    tuning.k_prime = k_prime;
    tuning.replications = reps;
    tuning.seed = o.seed;
    if (!grid.empty()) {
        const auto parts = [&] {
            std::vector<std::string> out;
            std::string item;
            std::stringstream ss(grid);
            while (std::getline(ss, item, ':')) out.push_back(item);
            return out;
        }();
        if (parts.size() != 3)
            throw std::invalid_argument("--grid must be start:step:stop");
        tuning.grid_start = std::stod(parts[0]);
        tuning.grid_step = std::stod(parts[1]);
        tuning.grid_stop = std::stod(parts[2]);
    }
    const auto res = copeq::tune_alpha(data.samples, cfg, tuning);
    print_json(copeq::to_json(res));
    return 0;
}

int run_simulate(const std::string& config_path, const CLI::App* sub,
                 const CommonOpts& o, int replications, const std::string& out_path,
                 const std::string& format) {
    copeq::ExperimentConfig cfg = copeq::load_experiment_config(config_path);
    if (sub->count("--seed")) cfg.seed = o.seed;
    if (sub->count("--level")) cfg.level = o.level;
    if (sub->count("--dmax")) cfg.d_max = o.d_max;
    if (sub->count("--pairing"))
        cfg.pairing = o.pairing == "paired" ? copeq::Pairing::Paired
                                            : copeq::Pairing::Independent;
    if (sub->count("--alpha")) {
        cfg.tune = o.alpha == "tune";
        if (!cfg.tune) cfg.alpha = std::stod(o.alpha);
    }
    if (replications > 0) cfg.replications = replications;

    const auto report = copeq::run_experiment(cfg);
    const std::string body = format == "json"
                                 ? copeq::to_json(report).dump(2) + "\n"
                                 : copeq::emit_report(report);
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << body;
    }
    return 0;
}

int run_spearman(const CommonOpts& o) {
    const auto sample = copeq::load_csv_sample(o.files[0]);
    if (sample.dim() != 2)
        throw std::invalid_argument("spearman needs a CSV with exactly 2 columns, got " +
                                    std::to_string(sample.dim()));
    const auto ties =
        o.ties == "error" ? copeq::TiePolicy::Error : copeq::TiePolicy::Average;
    const auto ps = copeq::pseudo_observations(sample, ties);
    nlohmann::json j;
    j["spearman_rho"] = copeq::spearman_rho(ps);
    j["n"] = sample.n();
    print_json(j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank-based K-sample tests for equality of copulas"};
    app.require_subcommand(1);

    CommonOpts test_o, anova_o, cluster_o, tune_o, spearman_o;
    auto* test_cmd = app.add_subcommand("test", "K-sample equality test");
    add_common(test_cmd, test_o, true);
    auto* anova_cmd = app.add_subcommand("anova", "all pairwise two-sample tests");
    add_common(anova_cmd, anova_o, true);
    auto* cluster_cmd = app.add_subcommand("cluster", "group populations by copula");
    add_common(cluster_cmd, cluster_o, true);

    auto* tune_cmd = app.add_subcommand("tune", "pick the penalty constant from data");
    add_common(tune_cmd, tune_o, true);
    int tune_kprime = 3, tune_reps = 20;
    std::string tune_grid;
    tune_cmd->add_option("--kprime", tune_kprime, "sub-samples per replication")
        ->capture_default_str();
    tune_cmd->add_option("--replications", tune_reps, "tuning replications")
        ->capture_default_str();
    tune_cmd->add_option("--grid", tune_grid, "penalty grid start:step:stop");

    CommonOpts sim_o;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiment from a design file");
    std::string sim_config, sim_out, sim_format = "csv";
    int sim_reps = 0;
    sim_cmd->add_option("config", sim_config, "design config file")->required();
    sim_cmd->add_option("--seed", sim_o.seed, "override the design seed");
    sim_cmd->add_option("--level", sim_o.level, "override the test level");
    sim_cmd->add_option("--dmax", sim_o.d_max, "override the scan depth");
    sim_cmd->add_option("--pairing", sim_o.pairing, "override the pairing")
        ->check(CLI::IsMember({"paired", "independent"}));
    sim_cmd->add_option("--alpha", sim_o.alpha, "override the penalty: number or 'tune'");
    sim_cmd->add_option("--replications", sim_reps, "override the replication count");
    sim_cmd->add_option("--out", sim_out, "write the report here instead of stdout");
    sim_cmd->add_option("--format", sim_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* spearman_cmd =
        app.add_subcommand("spearman", "rank-projection Spearman coefficient");
    add_common(spearman_cmd, spearman_o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(test_cmd)) return run_test(test_o);
        if (app.got_subcommand(anova_cmd)) return run_anova(anova_o);
        if (app.got_subcommand(cluster_cmd)) return run_cluster(cluster_o);
        if (app.got_subcommand(tune_cmd))
            return run_tune(tune_o, tune_kprime, tune_reps, tune_grid);
        if (app.got_subcommand(sim_cmd))
            return run_simulate(sim_config, sim_cmd, sim_o, sim_reps, sim_out, sim_format);
        if (app.got_subcommand(spearman_cmd)) return run_spearman(spearman_o);
    } catch (const copeq::TiesError& e) {
        std::cerr << "error: " << e.what() << " (use --ties average)\n";
        return 2;
    } catch (const copeq::CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;  // unreachable: a subcommand is required
}
