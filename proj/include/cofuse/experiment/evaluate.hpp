#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cofuse/core/error.hpp"
#include "cofuse/experiment/csv.hpp"
#include "cofuse/experiment/simulate.hpp"
#include "cofuse/metrics/ospa.hpp"
#include "cofuse/metrics/report.hpp"
#include "cofuse/scenario/truth.hpp"

namespace cofuse::experiment {

struct RunMetadata {
    std::string mode;
    std::string scenario_hash;
    std::uint64_t run_index = 0;
};

inline RunMetadata read_metadata(const std::filesystem::path& dir) {
    const auto path = dir / "metadata.json";
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("missing metadata file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
        return {j.at("mode").get<std::string>(), j.at("scenario_hash").get<std::string>(),
                j.at("run_index").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
}

/// Rebuilds the evaluation view of one run directory.
inline metrics::TrackHistory load_history(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "truth.csv")) throw ConfigError("missing truth file " + (dir / "truth.csv").string());
    metrics::TrackHistory h;

    const auto truth = CsvTable::read(dir / "truth.csv");
    const auto ts = truth.column("scan"), tv = truth.column("vehicle_id"), tx = truth.column("px"), ty = truth.column("py");
    for (std::size_t r = 0; r < truth.rows().size(); ++r) {
        const Time k = truth.integer(r, ts);
        h.truth[static_cast<std::uint32_t>(truth.integer(r, tv))][k] = {truth.real(r, tx), truth.real(r, ty)};
        h.horizon = std::max(h.horizon, k);
    }

    const auto nodes = CsvTable::read(dir / "nodes.csv");
    const auto ns = nodes.column("scan"), nn = nodes.column("node"), nh = nodes.column("host");
    for (std::size_t r = 0; r < nodes.rows().size(); ++r) {
        const auto node = static_cast<NodeId>(nodes.integer(r, nn));
        const auto host = nodes.integer(r, nh);
        h.hosts[node] = host > 0 ? std::optional<std::uint32_t>(static_cast<std::uint32_t>(host)) : std::nullopt;
        h.record(node, nodes.integer(r, ns), {});
    }

    const auto tracks = CsvTable::read(dir / "tracks.csv");
    const auto kn = tracks.column("node"), ks = tracks.column("scan"), lk = tracks.column("label_k"),
               ln = tracks.column("label_node"), li = tracks.column("label_index"), px = tracks.column("px"),
               py = tracks.column("py");
    for (std::size_t r = 0; r < tracks.rows().size(); ++r) {
        const auto node = static_cast<NodeId>(tracks.integer(r, kn));
        const Time k = tracks.integer(r, ks);
        if (!h.node_exists(node, k))
            throw ParseError((dir / "tracks.csv").string() + ":" + std::to_string(r + 2), "estimate for a node that did not exist");
        Label label{tracks.integer(r, lk), static_cast<NodeId>(tracks.integer(r, ln)),
                    static_cast<std::uint32_t>(tracks.integer(r, li))};
        h.estimates[node][k].push_back({label, {tracks.real(r, px), tracks.real(r, py)}});
    }
    return h;
}

/// Evaluation view of an in-memory run.
inline metrics::TrackHistory make_history(const RunOutput& run, const scenario::GroundTruth& truth) {
    metrics::TrackHistory h;
    h.horizon = truth.scans();
    for (Time k = 1; k <= truth.scans(); ++k)
        for (const auto& [id, x] : truth.at(k)) h.truth[id][k] = x.position();
    for (const auto& n : run.nodes) {
        h.hosts[n.node] = n.host;
        h.record(n.node, n.scan, {});
    }
    for (const auto& t : run.tracks) h.estimates[t.node][t.scan].push_back({t.label, t.position});
    return h;
}

struct RunMetrics {
    RunMetadata meta;
    std::vector<metrics::CardinalityRow> cardinality;
    std::vector<metrics::Ospa2Row> ospa2;
};

struct ModeSummary {
    std::string mode;
    std::size_t runs = 0;
    double mean_ospa2 = 0.0;
    double mean_abs_cardinality_error = 0.0;
    double mean_cardinality_bias = 0.0;
};

/// Mean over scans at which at least one node exists. Cardinality is compared with the
/// truth count that matches the OSPA convention: host included or excluded.
inline ModeSummary summarize(const std::string& mode, const std::vector<const RunMetrics*>& runs,
                             bool include_host = true) {
    ModeSummary s;
    s.mode = mode;
    s.runs = runs.size();
    std::size_t n = 0;
    for (const auto* r : runs) {
        for (std::size_t i = 0; i < r->cardinality.size(); ++i) {
            if (r->cardinality[i].nodes == 0) continue;
            const auto& row = r->cardinality[i];
            const double err = row.mean_est - (include_host ? row.truth_all : row.truth);
            s.mean_abs_cardinality_error += std::abs(err);
            s.mean_cardinality_bias += err;
            s.mean_ospa2 += r->ospa2[i].value;
            ++n;
        }
    }
    if (n > 0) {
        s.mean_ospa2 /= static_cast<double>(n);
        s.mean_abs_cardinality_error /= static_cast<double>(n);
        s.mean_cardinality_bias /= static_cast<double>(n);
    }
    return s;
}

inline RunMetrics evaluate_run(const std::filesystem::path& dir, const metrics::MetricsConfig& cfg) {
    RunMetrics m;
    m.meta = read_metadata(dir);
    const auto h = load_history(dir);
    m.cardinality = metrics::cardinality_report(h);
    m.ospa2 = metrics::ospa2_report(h, cfg);
    return m;
}

/// Evaluates run directories of one scenario. Writes <out>/<mode>/cardinality.csv and
/// <out>/<mode>/ospa2.csv (per-scan means over runs), <out>/summary.csv (one row per mode)
/// and, when both modes are present, <out>/paired.csv (per run index).
inline std::vector<ModeSummary> evaluate(const std::vector<std::filesystem::path>& run_dirs,
                                         const metrics::MetricsConfig& cfg, const std::filesystem::path& out) {
    cfg.validate();
    if (run_dirs.empty()) throw ConfigError("evaluate: no run directories");
    std::vector<RunMetrics> all;
    for (const auto& dir : run_dirs) all.push_back(evaluate_run(dir, cfg));
    for (const auto& r : all)
        if (r.meta.scenario_hash != all.front().meta.scenario_hash)
            throw ConfigError("evaluate: runs come from different scenarios (hash " + r.meta.scenario_hash + " vs " +
                              all.front().meta.scenario_hash + ")");

    std::map<std::string, std::vector<const RunMetrics*>> by_mode;
    for (const auto& r : all) by_mode[r.meta.mode].push_back(&r);

    std::filesystem::create_directories(out);
    std::vector<ModeSummary> summaries;
    for (const auto& [mode, runs] : by_mode) {
        const std::size_t scans = runs.front()->cardinality.size();
        std::vector<metrics::CardinalityRow> card(scans);
        std::vector<metrics::Ospa2Row> o2(scans);
        for (const auto* r : runs) {
            if (r->cardinality.size() != scans) throw ConfigError("evaluate: runs have different horizons");
            for (std::size_t i = 0; i < scans; ++i) {
                card[i].scan = r->cardinality[i].scan;
                card[i].nodes = r->cardinality[i].nodes;
                card[i].mean_est += r->cardinality[i].mean_est;
                card[i].truth += r->cardinality[i].truth;
                card[i].truth_all += r->cardinality[i].truth_all;
                o2[i].scan = r->ospa2[i].scan;
                o2[i].nodes = r->ospa2[i].nodes;
                o2[i].value += r->ospa2[i].value;
            }
        }
        const double n = static_cast<double>(runs.size());
        for (std::size_t i = 0; i < scans; ++i) {
            card[i].mean_est /= n;
            card[i].truth /= n;
            card[i].truth_all /= n;
            o2[i].value /= n;
        }
        std::filesystem::create_directories(out / mode);
        detail::write_file(out / mode / "cardinality.csv", [&](std::ostream& os) { metrics::write_cardinality_csv(os, card); });
        detail::write_file(out / mode / "ospa2.csv", [&](std::ostream& os) { metrics::write_ospa2_csv(os, o2); });
        summaries.push_back(summarize(mode, runs, cfg.include_host));
    }

    detail::write_file(out / "summary.csv", [&](std::ostream& os) {
        os << "mode,runs,mean_ospa2,mean_abs_cardinality_error,mean_cardinality_bias\n" << std::fixed << std::setprecision(6);
        for (const auto& s : summaries)
            os << s.mode << ',' << s.runs << ',' << s.mean_ospa2 << ',' << s.mean_abs_cardinality_error << ','
               << s.mean_cardinality_bias << '\n';
    });

    if (by_mode.contains("ours") && by_mode.contains("baseline")) {
        std::map<std::uint64_t, std::pair<std::optional<double>, std::optional<double>>> pairs;
        for (const auto* r : by_mode["ours"]) pairs[r->meta.run_index].first = summarize("ours", {r}, cfg.include_host).mean_ospa2;
        for (const auto* r : by_mode["baseline"]) pairs[r->meta.run_index].second = summarize("baseline", {r}, cfg.include_host).mean_ospa2;
        detail::write_file(out / "paired.csv", [&](std::ostream& os) {
            os << "run,ours_ospa2,baseline_ospa2,difference\n" << std::fixed << std::setprecision(6);
            for (const auto& [run, p] : pairs) {
                if (!p.first || !p.second) continue;
                os << run << ',' << *p.first << ',' << *p.second << ',' << (*p.first - *p.second) << '\n';
            }
        });
    }
    return summaries;
}

} // namespace cofuse::experiment
