#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "cofuse/core/label.hpp"
#include "cofuse/metrics/ospa.hpp"

namespace cofuse::metrics {

struct LabeledPoint {
    Label label;
    Point position;
};

/// Extracted estimates per (node, scan) plus the ground truth they are judged against. A
/// node has an entry at scan k exactly when it existed at k, possibly with no estimates.
struct TrackHistory {
    Time horizon = 0;
    std::map<NodeId, std::optional<std::uint32_t>> hosts; ///< host vehicle of mobile nodes
    std::map<NodeId, std::map<Time, std::vector<LabeledPoint>>> estimates;
    std::map<std::uint32_t, Track> truth; ///< keyed by vehicle id

    void record(NodeId node, Time k, std::vector<LabeledPoint> points) { estimates[node][k] = std::move(points); }

    [[nodiscard]] bool node_exists(NodeId node, Time k) const {
        auto it = estimates.find(node);
        return it != estimates.end() && it->second.contains(k);
    }

    [[nodiscard]] std::size_t truth_count(Time k, std::optional<std::uint32_t> exclude = std::nullopt) const {
        std::size_t n = 0;
        for (const auto& [id, t] : truth)
            if (t.contains(k) && (!exclude || *exclude != id)) ++n;
        return n;
    }

    [[nodiscard]] std::optional<std::uint32_t> host(NodeId node) const {
        auto it = hosts.find(node);
        return it == hosts.end() ? std::nullopt : it->second;
    }
};

/// Truth tracks a node is evaluated against, restricted to its lifetime; the host is
/// dropped unless `include_host`.
inline std::map<std::uint32_t, Track> node_truth_tracks(const TrackHistory& h, NodeId node, bool include_host) {
    std::map<std::uint32_t, Track> out;
    const auto host = include_host ? std::nullopt : h.host(node);
    const auto it = h.estimates.find(node);
    if (it == h.estimates.end()) return out;
    for (const auto& [id, track] : h.truth) {
        if (host && *host == id) continue;
        Track t;
        for (const auto& [k, p] : track)
            if (it->second.contains(k)) t.emplace(k, p);
        if (!t.empty()) out.emplace(id, std::move(t));
    }
    return out;
}

inline std::map<Label, Track> node_estimate_tracks(const TrackHistory& h, NodeId node) {
    std::map<Label, Track> out;
    const auto it = h.estimates.find(node);
    if (it == h.estimates.end()) return out;
    for (const auto& [k, points] : it->second)
        for (const auto& lp : points) out[lp.label][k] = lp.position;
    return out;
}

struct CardinalityRow {
    Time scan = 0;
    std::size_t nodes = 0;  ///< nodes existing at this scan
    double mean_est = 0.0;  ///< mean extracted-estimate count over those nodes
    double truth = 0.0;     ///< mean host-excluded truth count over those nodes
    double truth_all = 0.0; ///< alive vehicles, host included
};

inline std::vector<CardinalityRow> cardinality_report(const TrackHistory& h) {
    std::vector<CardinalityRow> rows;
    for (Time k = 1; k <= h.horizon; ++k) {
        CardinalityRow r;
        r.scan = k;
        r.truth_all = static_cast<double>(h.truth_count(k));
        for (const auto& [node, scans] : h.estimates) {
            auto it = scans.find(k);
            if (it == scans.end()) continue;
            ++r.nodes;
            r.mean_est += static_cast<double>(it->second.size());
            r.truth += static_cast<double>(h.truth_count(k, h.host(node)));
        }
        if (r.nodes > 0) {
            r.mean_est /= static_cast<double>(r.nodes);
            r.truth /= static_cast<double>(r.nodes);
        }
        rows.push_back(r);
    }
    return rows;
}

struct Ospa2Row {
    Time scan = 0;
    std::size_t nodes = 0;
    double value = 0.0; ///< mean over existing nodes
};

inline std::vector<Ospa2Row> ospa2_report(const TrackHistory& h, const MetricsConfig& cfg) {
    cfg.validate();
    std::map<NodeId, std::map<Label, Track>> est;
    std::map<NodeId, std::map<std::uint32_t, Track>> truth;
    for (const auto& [node, scans] : h.estimates) {
        est[node] = node_estimate_tracks(h, node);
        truth[node] = node_truth_tracks(h, node, cfg.include_host);
    }
    std::vector<Ospa2Row> rows;
    for (Time k = 1; k <= h.horizon; ++k) {
        Ospa2Row r;
        r.scan = k;
        for (const auto& [node, scans] : h.estimates) {
            if (!scans.contains(k)) continue;
            ++r.nodes;
            r.value += ospa2(est[node], truth[node], k, cfg);
        }
        if (r.nodes > 0) r.value /= static_cast<double>(r.nodes);
        rows.push_back(r);
    }
    return rows;
}

inline void write_cardinality_csv(std::ostream& os, const std::vector<CardinalityRow>& rows) {
    os << "scan,mean_est,truth,truth_all,nodes\n" << std::fixed << std::setprecision(6);
    for (const auto& r : rows) os << r.scan << ',' << r.mean_est << ',' << r.truth << ',' << r.truth_all << ',' << r.nodes << '\n';
}

inline void write_ospa2_csv(std::ostream& os, const std::vector<Ospa2Row>& rows) {
    os << "scan,value,nodes\n" << std::fixed << std::setprecision(6);
    for (const auto& r : rows) os << r.scan << ',' << r.value << ',' << r.nodes << '\n';
}

} // namespace cofuse::metrics
