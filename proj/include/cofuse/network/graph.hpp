#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/label.hpp"

namespace cofuse::net {

/// Undirected communication graph. Self-loops are not stored; closed_neighborhood(i)
/// adds i back.
class NetworkGraph {
public:
    void add_node(NodeId id) { adjacency_.try_emplace(id); }

    void add_edge(NodeId a, NodeId b) {
        if (a == b) return;
        adjacency_[a].insert(b);
        adjacency_[b].insert(a);
    }

    [[nodiscard]] bool contains(NodeId id) const { return adjacency_.contains(id); }

    [[nodiscard]] bool connected(NodeId a, NodeId b) const {
        auto it = adjacency_.find(a);
        return it != adjacency_.end() && it->second.contains(b);
    }

    [[nodiscard]] std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        out.reserve(adjacency_.size());
        for (const auto& [id, nb] : adjacency_) out.push_back(id);
        return out;
    }

    /// Neighbors of `id`, excluding `id`, ascending.
    [[nodiscard]] std::vector<NodeId> neighbors(NodeId id) const {
        auto it = adjacency_.find(id);
        if (it == adjacency_.end()) throw PreconditionError("NetworkGraph: unknown node");
        return {it->second.begin(), it->second.end()};
    }

    /// Neighbors of `id` together with `id` itself, ascending.
    [[nodiscard]] std::vector<NodeId> closed_neighborhood(NodeId id) const {
        auto out = neighbors(id);
        out.insert(std::upper_bound(out.begin(), out.end(), id), id);
        return out;
    }

    [[nodiscard]] std::size_t node_count() const noexcept { return adjacency_.size(); }

    [[nodiscard]] std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& [id, nb] : adjacency_) twice += nb.size();
        return twice / 2;
    }

private:
    std::map<NodeId, std::set<NodeId>> adjacency_;
};

struct NodePlacement {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double comm_range = 100.0; ///< m
};

/// Range-disc graph: i and j are linked iff 0 < |p_i - p_j| <= max(range_i, range_j).
/// A long-range node (a fixed roadside sensor) thus reaches every node within its own range.
inline NetworkGraph build_graph(const std::map<NodeId, NodePlacement>& placements) {
    NetworkGraph g;
    for (const auto& [id, p] : placements) {
        if (!(p.comm_range > 0.0)) throw PreconditionError("build_graph: comm_range must be positive");
        g.add_node(id);
    }
    for (auto a = placements.begin(); a != placements.end(); ++a) {
        for (auto b = std::next(a); b != placements.end(); ++b) {
            const double d = (a->second.position - b->second.position).norm();
            if (d > 0.0 && d <= std::max(a->second.comm_range, b->second.comm_range)) g.add_edge(a->first, b->first);
        }
    }
    return g;
}

/// Range-disc graph with one communication range for every node.
inline NetworkGraph build_graph(const std::map<NodeId, Eigen::Vector2d>& positions, double comm_range) {
    if (!(comm_range > 0.0)) throw PreconditionError("build_graph: comm_range must be positive");
    std::map<NodeId, NodePlacement> placements;
    for (const auto& [id, p] : positions) placements.emplace(id, NodePlacement{p, comm_range});
    return build_graph(placements);
}

/// Path graph 1-2-...-n.
inline NetworkGraph line_graph(NodeId n) {
    NetworkGraph g;
    for (NodeId i = 1; i <= n; ++i) {
        g.add_node(i);
        if (i > 1) g.add_edge(i - 1, i);
    }
    return g;
}

/// Complete graph on 1..n.
inline NetworkGraph complete_graph(NodeId n) {
    NetworkGraph g;
    for (NodeId i = 1; i <= n; ++i) {
        g.add_node(i);
        for (NodeId j = 1; j < i; ++j) g.add_edge(i, j);
    }
    return g;
}

} // namespace cofuse::net
