#include <algorithm>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cofuse/cofuse.hpp"

namespace fs = std::filesystem;
using namespace cofuse;

namespace {

struct MetricsFlags {
    Time window = 10;
    double cutoff = 50.0;
    double order = 1.0;
    bool exclude_host = false;

    [[nodiscard]] metrics::MetricsConfig config() const { return {cutoff, order, window, !exclude_host}; }
};

void add_metrics_flags(CLI::App* cmd, MetricsFlags& m) {
    cmd->add_option("--metrics-window", m.window, "OSPA2 window length in scans")->capture_default_str();
    cmd->add_option("--metrics-cutoff", m.cutoff, "OSPA cutoff c in metres")->capture_default_str();
    cmd->add_option("--metrics-order", m.order, "OSPA order p")->capture_default_str();
    cmd->add_flag("--metrics-exclude-host", m.exclude_host, "Drop each node's host vehicle from its OSPA2 truth");
}

/// Run directories are those holding metadata.json; a root is searched recursively.
std::vector<fs::path> collect_runs(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> runs;
    for (const auto& in : inputs) {
        if (!fs::is_directory(in)) throw ConfigError("not a directory: " + in.string());
        if (fs::exists(in / "metadata.json")) {
            runs.push_back(in);
            continue;
        }
        std::vector<fs::path> found;
        for (const auto& e : fs::recursive_directory_iterator(in))
            if (e.is_regular_file() && e.path().filename() == "metadata.json") found.push_back(e.path().parent_path());
        std::sort(found.begin(), found.end());
        runs.insert(runs.end(), found.begin(), found.end());
    }
    if (runs.empty()) throw ConfigError("no run directories found");
    return runs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed labeled multi-Bernoulli tracking with complementary fusion"};
    app.require_subcommand(1);

    experiment::RunConfig run;
    std::string mode = "ours";
    MetricsFlags sim_metrics;
    auto* sim = app.add_subcommand("simulate", "Run seeded Monte Carlo simulations");
    sim->add_option("--scenario", run.scenario, "Scenario file")->required();
    sim->add_option("--mode", mode, "ours | baseline")->check(CLI::IsMember({"ours", "baseline"}))->capture_default_str();
    sim->add_option("--consensus", run.consensus_iterations, "Consensus rounds per scan")->capture_default_str();
    sim->add_option("--particles", run.particles, "Particles per Bernoulli component")->capture_default_str();
    sim->add_option("--seed", run.seed, "Base seed")->capture_default_str();
    sim->add_option("--runs", run.runs, "Monte Carlo runs")->capture_default_str();
    sim->add_option("--out", run.out, "Output directory")->capture_default_str();
    sim->add_flag("--dump-messages", run.dump_messages, "Write every broadcast posterior under messages/");
    add_metrics_flags(sim, sim_metrics);

    std::vector<fs::path> eval_inputs;
    fs::path eval_out = "report";
    MetricsFlags eval_metrics;
    auto* eval = app.add_subcommand("evaluate", "Compute cardinality and OSPA2 reports from run directories");
    eval->add_option("runs", eval_inputs, "Run directories or roots containing them")->required();
    eval->add_option("--out", eval_out, "Report directory")->capture_default_str();
    add_metrics_flags(eval, eval_metrics);

    fs::path truth_scenario;
    fs::path truth_out = "truth.csv";
    auto* truth = app.add_subcommand("truth", "Export the ground truth of a scenario as CSV");
    truth->add_option("--scenario", truth_scenario, "Scenario file")->required();
    truth->add_option("--out", truth_out, "Output CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*sim) {
            run.mode = experiment::parse_mode(mode);
            const auto cfg = sim_metrics.config();
            cfg.validate();
            const auto dirs = experiment::simulate(run);
            const auto aggregate = run.out / experiment::to_string(run.mode) / "aggregate";
            const auto summary = experiment::evaluate(dirs, cfg, aggregate);
            for (const auto& s : summary)
                std::cout << s.mode << ": runs=" << s.runs << " mean_ospa2=" << s.mean_ospa2
                          << " mean_abs_cardinality_error=" << s.mean_abs_cardinality_error << '\n';
        } else if (*eval) {
            const auto summary = experiment::evaluate(collect_runs(eval_inputs), eval_metrics.config(), eval_out);
            for (const auto& s : summary)
                std::cout << s.mode << ": runs=" << s.runs << " mean_ospa2=" << s.mean_ospa2
                          << " mean_abs_cardinality_error=" << s.mean_abs_cardinality_error << '\n';
        } else if (*truth) {
            const auto sc = scenario::load_scenario(truth_scenario);
            scenario::write_truth_csv(truth_out, scenario::generate_truth(sc));
        }
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
