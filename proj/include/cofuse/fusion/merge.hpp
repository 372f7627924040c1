#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/fusion/complementary.hpp"

namespace cofuse::fusion {

/// Groups of labels whose components are duplicates of each other: connected components
/// of the graph linking components with planar EAP distance below `threshold`.
/// Singletons are included. Each cluster is sorted oldest first; clusters are ordered by
/// their oldest label.
inline std::vector<std::vector<Label>> detect_duplicates(const LmbDensity& d, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("detect_duplicates: threshold must be positive");
    const auto& cs = d.components();
    const std::size_t n = cs.size();

    std::vector<KinematicState> eap(n);
    for (std::size_t i = 0; i < n; ++i) eap[i] = eap_estimate(cs[i]);

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    // Uniform grid with cell size equal to the threshold; neighbors lie in adjacent cells.
    auto cell_of = [&](double v) { return static_cast<std::int64_t>(std::floor(v / threshold)); };
    auto key = [](std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(cy);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) grid[key(cell_of(eap[i].px), cell_of(eap[i].py))].push_back(i);

    for (std::size_t i = 0; i < n; ++i) {
        const auto cx = cell_of(eap[i].px);
        const auto cy = cell_of(eap[i].py);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(key(cx + dx, cy + dy));
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i || planar_distance(eap[i], eap[j]) >= threshold) continue;
                    const auto a = find(i);
                    const auto b = find(j);
                    if (a != b) parent[std::max(a, b)] = std::min(a, b);
                }
            }
        }
    }

    // Components are label-sorted, so each root is its cluster's oldest member and
    // clusters come out ordered by oldest label.
    std::vector<std::vector<Label>> clusters;
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(slot[root])].push_back(cs[i].label);
    }
    return clusters;
}

/// Merges two components that represent the same object. The merged label is the older
/// one, existence follows the union rule r1 + r2 - r1 r2, and the particle sets are pooled
/// with weights scaled by r1/(r1+r2) and r2/(r1+r2), then resampled to `particle_count`.
inline BernoulliComponent merge_pair(const BernoulliComponent& c1, const BernoulliComponent& c2,
                                     std::size_t particle_count, Rng& rng) {
    if (c1.label == c2.label) throw PreconditionError("merge_pair: components share a label");
    const double r1 = c1.existence;
    const double r2 = c2.existence;
    const double alpha1 = (r1 + r2) > 0.0 ? r1 / (r1 + r2) : 0.5;
    const double alpha2 = 1.0 - alpha1;

    const auto p1 = c1.particles().particles();
    const auto p2 = c2.particles().particles();
    std::vector<Particle> pooled;
    pooled.reserve(p1.size() + p2.size());
    for (const auto& p : p1) pooled.push_back({p.state, alpha1 * p.weight});
    for (const auto& p : p2) pooled.push_back({p.state, alpha2 * p.weight});

    BernoulliComponent merged;
    merged.label = std::min(c1.label, c2.label);
    merged.existence = std::clamp(r1 + r2 - r1 * r2, 0.0, 1.0);
    merged.density = share(resample(pooled, particle_count, rng));
    return merged;
}

/// Collapses every duplicate cluster into one component, folding from the oldest label.
inline LmbDensity merge_all(const LmbDensity& d, const FusionConfig& cfg, Rng& rng) {
    const auto clusters = detect_duplicates(d, cfg.merge_distance);
    if (clusters.size() == d.size()) return d;

    std::vector<BernoulliComponent> out;
    out.reserve(clusters.size());
    for (const auto& cluster : clusters) {
        BernoulliComponent acc = *d.find(cluster.front());
        for (std::size_t k = 1; k < cluster.size(); ++k) {
            acc = merge_pair(acc, *d.find(cluster[k]), cfg.merged_particle_count, rng);
        }
        out.push_back(std::move(acc));
    }
    return LmbDensity{d.time(), d.owner(), std::move(out)};
}

} // namespace cofuse::fusion
