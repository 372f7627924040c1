#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/experiment/csv.hpp"
#include "cofuse/filter/lmb_filter.hpp"
#include "cofuse/fusion/consensus.hpp"
#include "cofuse/network/graph.hpp"
#include "cofuse/network/message.hpp"
#include "cofuse/scenario/config.hpp"
#include "cofuse/scenario/measurements.hpp"
#include "cofuse/scenario/truth.hpp"

namespace cofuse::experiment {

/// "ours": node-extended labels and merging after each fusion; "baseline": degenerate
/// (k, m) labels and fusion only. Nothing else differs between the two.
enum class Mode { Ours, Baseline };

inline std::string to_string(Mode m) { return m == Mode::Ours ? "ours" : "baseline"; }

inline Mode parse_mode(const std::string& s) {
    if (s == "ours") return Mode::Ours;
    if (s == "baseline") return Mode::Baseline;
    throw ConfigError("mode must be 'ours' or 'baseline', got '" + s + "'");
}

struct RunConfig {
    std::filesystem::path scenario;
    Mode mode = Mode::Ours;
    std::size_t consensus_iterations = 3;
    std::size_t particles = 1000;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    std::filesystem::path out = "out";
    bool dump_messages = false;

    void validate() const {
        if (runs < 1) throw ConfigError("runs must be at least 1");
        if (particles < 1) throw ConfigError("particles must be at least 1");
    }
};

/// Everything the per-node trackers and the fusion stage need for one mode.
struct TrackerSetup {
    filter::FilterConfig filter;
    CtModelParams motion;
    filter::BirthConfig birth;
    fusion::FusionConfig fusion;
    LabelMode label_mode = LabelMode::NodeExtended;
};

inline TrackerSetup make_setup(const scenario::ScenarioConfig& sc, Mode mode, std::size_t consensus_iterations,
                               std::size_t particles) {
    TrackerSetup s;
    s.filter = sc.tracker.filter;
    s.filter.particles_per_component = particles;
    s.motion = sc.tracker.motion;
    s.motion.dt = sc.dt;
    s.birth = sc.tracker.birth;
    s.birth.particles = particles;
    s.fusion.consensus_iterations = consensus_iterations;
    s.fusion.merge_distance = sc.tracker.merge_distance;
    s.fusion.merged_particle_count = particles;
    s.fusion.merge = mode == Mode::Ours;
    s.label_mode = mode == Mode::Ours ? LabelMode::NodeExtended : LabelMode::Degenerate;
    s.filter.validate();
    s.motion.validate();
    s.birth.validate();
    s.fusion.validate();
    return s;
}

struct NodeRecord {
    Time scan = 0;
    NodeId node = 0;
    std::optional<VehicleId> host;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct TrackRecord {
    NodeId node = 0;
    Time scan = 0;
    Label label;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct RunOutput {
    std::vector<NodeRecord> nodes;
    std::vector<TrackRecord> tracks;
};

/// Called once per scan with the local filter posteriors and the fused posteriors.
using ScanObserver = std::function<void(Time, const fusion::PosteriorMap& local, const fusion::PosteriorMap& fused)>;

inline constexpr std::uint64_t kFilterStream = 0x66696c74ULL;
inline constexpr std::uint64_t kFusionStream = 0x66757365ULL;

/// One Monte Carlo run. A node exists while its sensor does (a mobile sensor while its
/// host is alive); its filter starts empty on the first scan it exists. Each scan: every
/// node runs predict/update on its own measurements, then the alive nodes run consensus on
/// the communication graph and report estimates from their fused posteriors. Fused
/// posteriors are not fed back into the local recursions.
inline RunOutput run_simulation(const scenario::ScenarioConfig& sc, const scenario::GroundTruth& truth,
                                const TrackerSetup& setup, std::uint64_t seed,
                                const fusion::BroadcastHook& on_broadcast = {}, const ScanObserver& observer = {}) {
    RunOutput out;
    std::map<NodeId, filter::LmbFilter> filters;
    for (Time k = 1; k <= sc.scans; ++k) {
        fusion::PosteriorMap local;
        std::map<NodeId, net::NodePlacement> placements;
        for (const auto& spec : sc.sensors) {
            const NodeId id = spec.model.node;
            const auto pos = scenario::sensor_position(truth, k, spec.model);
            if (!pos) {
                filters.erase(id);
                continue;
            }
            placements.emplace(id, net::NodePlacement{*pos, spec.comm_range});
            out.nodes.push_back({k, id, spec.model.host(), *pos});
            auto it = filters.find(id);
            if (it == filters.end()) {
                filter::BirthConfig birth = setup.birth;
                if (spec.birth_rim_points) birth.rim_points = *spec.birth_rim_points;
                it = filters
                         .emplace(id, filter::LmbFilter(id, setup.filter, setup.motion,
                                                        filter::BirthModel(birth, spec.model.range), spec.model,
                                                        setup.label_mode, k - 1))
                         .first;
            }
            const auto scan = scenario::simulate_scan(truth, k, spec.model, seed);
            Rng rng = make_rng(seed, {kFilterStream, id, static_cast<std::uint64_t>(k)});
            local.emplace(id, it->second.step(k, *pos, scan, rng));
        }

        const auto graph = net::build_graph(placements);
        auto fused = fusion::run_consensus(local, graph, setup.fusion,
                                           derive_seed(seed, {kFusionStream, static_cast<std::uint64_t>(k)}), on_broadcast);
        for (const auto& [id, d] : fused)
            for (const auto& e : extract_estimates(d, setup.filter.extraction_threshold))
                out.tracks.push_back({id, k, e.label, e.state.position()});
        if (observer) observer(k, local, fused);
    }
    return out;
}

inline void write_nodes_csv(std::ostream& os, const RunOutput& run) {
    os << "scan,node,host,px,py\n" << std::fixed << std::setprecision(6);
    for (const auto& n : run.nodes)
        os << n.scan << ',' << n.node << ',' << (n.host ? *n.host : 0) << ',' << n.position.x() << ',' << n.position.y() << '\n';
}

inline void write_tracks_csv(std::ostream& os, const RunOutput& run) {
    os << "node,scan,label_k,label_node,label_index,px,py\n" << std::fixed << std::setprecision(6);
    for (const auto& t : run.tracks)
        os << t.node << ',' << t.scan << ',' << t.label.birth_time << ',' << t.label.origin_node << ','
           << t.label.birth_index << ',' << t.position.x() << ',' << t.position.y() << '\n';
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    body(f);
    if (!f) throw ConfigError("failed writing " + path.string());
}

} // namespace detail

inline std::filesystem::path run_directory(const std::filesystem::path& out, Mode mode, std::size_t run) {
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << run;
    return out / to_string(mode) / name.str();
}

/// Runs `cfg.runs` Monte Carlo repetitions; run r uses the seed derive_seed(cfg.seed, {r}).
/// Each run directory receives metadata.json, truth.csv, nodes.csv, tracks.csv and, when
/// requested, messages/. Returns the run directories.
inline std::vector<std::filesystem::path> simulate(const RunConfig& cfg) {
    cfg.validate();
    const std::string text = scenario::read_text(cfg.scenario);
    const auto sc = scenario::parse_scenario(text);
    const auto truth = scenario::generate_truth(sc);
    const auto setup = make_setup(sc, cfg.mode, cfg.consensus_iterations, cfg.particles);
    const std::string hash = hex64(fnv1a(text));

    std::vector<std::filesystem::path> dirs;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        const auto dir = run_directory(cfg.out, cfg.mode, r);
        std::filesystem::create_directories(dir);
        const std::uint64_t run_seed = derive_seed(cfg.seed, {r});

        fusion::BroadcastHook hook;
        if (cfg.dump_messages) {
            hook = [&dir](NodeId, std::size_t round, const LmbDensity& d) {
                net::dump_message(dir / "messages", net::to_message(d, static_cast<std::uint32_t>(round)));
            };
        }
        const auto run = run_simulation(sc, truth, setup, run_seed, hook);

        nlohmann::ordered_json meta;
        meta["schema"] = "cofuse.run";
        meta["version"] = 1;
        meta["mode"] = to_string(cfg.mode);
        meta["consensus_iterations"] = cfg.consensus_iterations;
        meta["particles"] = cfg.particles;
        meta["seed"] = cfg.seed;
        meta["run_index"] = r;
        meta["run_seed"] = run_seed;
        meta["scenario_path"] = cfg.scenario.generic_string();
        meta["scenario_hash"] = hash;
        meta["scenario"] = nlohmann::ordered_json::parse(text, nullptr, true, true);
        detail::write_file(dir / "metadata.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
        detail::write_file(dir / "truth.csv", [&](std::ostream& os) { scenario::write_truth_csv(os, truth); });
        detail::write_file(dir / "nodes.csv", [&](std::ostream& os) { write_nodes_csv(os, run); });
        detail::write_file(dir / "tracks.csv", [&](std::ostream& os) { write_tracks_csv(os, run); });
        dirs.push_back(dir);
    }
    return dirs;
}

} // namespace cofuse::experiment
