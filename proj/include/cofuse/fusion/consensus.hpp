#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <map>
#include <vector>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/fusion/complementary.hpp"
#include "cofuse/fusion/merge.hpp"
#include "cofuse/network/graph.hpp"

namespace cofuse::fusion {

using PosteriorMap = std::map<NodeId, LmbDensity>;

/// Observes the posterior each node broadcasts at a consensus round, e.g. to dump messages.
using BroadcastHook = std::function<void(NodeId, std::size_t round, const LmbDensity&)>;

/// One synchronous consensus round. Every node fuses its own snapshot with its neighbors'
/// snapshots (all taken before the round) and, when enabled, merges duplicates.
/// Randomness for node i comes from the stream derive_seed(seed, {i}).
inline PosteriorMap consensus_round(const PosteriorMap& snapshot, const net::NetworkGraph& graph,
                                    const FusionConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::optional<Time> time;
    for (const auto& [id, d] : snapshot) {
        if (time && *time != d.time()) throw PreconditionError("consensus_round: posteriors at different scans");
        time = d.time();
    }

    PosteriorMap next;
    std::vector<LmbDensity> received;
    for (const auto& [id, local] : snapshot) {
        received.clear();
        if (graph.contains(id)) {
            for (NodeId nb : graph.neighbors(id)) {
                auto it = snapshot.find(nb);
                if (it != snapshot.end()) received.push_back(it->second);
            }
        }
        Rng rng{derive_seed(seed, {id})};
        LmbDensity fused = complementary_fuse(local, received, cfg, rng);
        if (cfg.merge) fused = merge_all(fused, cfg, rng);
        next.emplace(id, std::move(fused));
    }
    return next;
}

/// Exactly `cfg.consensus_iterations` rounds; zero rounds is the identity.
inline PosteriorMap run_consensus(PosteriorMap posteriors, const net::NetworkGraph& graph, const FusionConfig& cfg,
                                  std::uint64_t seed, const BroadcastHook& on_broadcast = {}) {
    for (std::size_t round = 0; round < cfg.consensus_iterations; ++round) {
        if (on_broadcast) {
            for (const auto& [id, d] : posteriors) on_broadcast(id, round, d);
        }
        posteriors = consensus_round(posteriors, graph, cfg, derive_seed(seed, {round}));
    }
    return posteriors;
}

} // namespace cofuse::fusion
