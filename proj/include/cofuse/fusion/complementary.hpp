#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/odds.hpp"
#include "cofuse/core/random.hpp"

namespace cofuse::fusion {

struct FusionConfig {
    std::size_t consensus_iterations = 3;
    double merge_distance = 2.0;            ///< m, planar EAP distance below which components merge
    std::size_t merged_particle_count = 1000;
    bool merge = true;                      ///< duplicate merging after every fusion round
    // Neighbors are weighted equally; there is no per-neighbor weighting to configure.

    void validate() const {
        if (!(merge_distance > 0.0)) throw PreconditionError("FusionConfig: merge_distance must be positive");
        if (merged_particle_count < 1) throw PreconditionError("FusionConfig: merged_particle_count must be >= 1");
    }
};

/// Fused existence sum(rho) / (1 + sum(rho)) with rho = r/(1-r), each r clamped below one.
inline double fuse_existence(std::span<const double> rs) {
    if (rs.empty()) throw PreconditionError("fuse_existence: no inputs");
    double sum = 0.0;
    double largest = 0.0;
    for (double r : rs) {
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("fuse_existence: existence outside [0,1]");
        sum += odds(clamp_existence(r)).value();
        largest = std::max(largest, clamp_existence(r));
    }
    // Exact arithmetic gives at least the largest input; the round trip through odds can
    // lose an ulp.
    return std::max(largest, clamp_existence(sum / (1.0 + sum)));
}

struct DensitySource {
    double existence = 0.0;
    SharedParticles density;
};

/// Odds-weighted mixture of the sources' particle densities, resampled to `particle_count`.
/// The first source is treated as local: it is returned as-is if every source has zero
/// existence. Sources that share one particle set yield that set unchanged, since the
/// mixture of identical densities is the density itself.
inline SharedParticles fuse_density(std::span<const DensitySource> sources, std::size_t particle_count, Rng& rng) {
    if (sources.empty()) throw PreconditionError("fuse_density: no inputs");
    bool shared = true;
    for (const auto& s : sources) {
        if (!s.density || s.density->empty()) throw PreconditionError("fuse_density: source without particles");
        shared = shared && s.density == sources.front().density;
    }
    if (shared) return sources.front().density;

    std::vector<double> rho;
    rho.reserve(sources.size());
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& s : sources) {
        rho.push_back(odds(clamp_existence(s.existence)).value());
        total += rho.back();
        count += s.density->size();
    }
    if (!(total > 0.0)) return sources.front().density;

    std::vector<Particle> pooled;
    pooled.reserve(count);
    for (std::size_t k = 0; k < sources.size(); ++k) {
        if (rho[k] <= 0.0) continue;
        const double scale = rho[k] / total;
        for (const auto& p : sources[k].density->particles()) pooled.push_back({p.state, scale * p.weight});
    }
    return share(resample(pooled, particle_count, rng));
}

/// Complementary fusion of a node's posterior with those received from its neighbors.
///
/// The output label set is the union of the inputs'. For each label, existence and density
/// are fused over exactly the inputs that contain it; labels held by a single input pass
/// through untouched.
inline LmbDensity complementary_fuse(const LmbDensity& local, std::span<const LmbDensity> received,
                                     const FusionConfig& cfg, Rng& rng) {
    for (const auto& d : received) {
        if (d.time() != local.time()) throw PreconditionError("complementary_fuse: scan time mismatch");
    }
    if (received.empty()) return local;

    // k-way merge over label-sorted component lists.
    std::vector<const LmbDensity*> inputs;
    inputs.reserve(received.size() + 1);
    inputs.push_back(&local);
    for (const auto& d : received) inputs.push_back(&d);
    std::vector<std::size_t> cursor(inputs.size(), 0);

    std::vector<BernoulliComponent> out;
    std::vector<const BernoulliComponent*> holders;
    std::vector<double> rs;
    std::vector<DensitySource> sources;
    while (true) {
        const Label* next = nullptr;
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            const auto& cs = inputs[s]->components();
            if (cursor[s] < cs.size() && (!next || cs[cursor[s]].label < *next)) next = &cs[cursor[s]].label;
        }
        if (!next) break;
        const Label label = *next;

        holders.clear();
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            const auto& cs = inputs[s]->components();
            if (cursor[s] < cs.size() && cs[cursor[s]].label == label) holders.push_back(&cs[cursor[s]++]);
        }
        if (holders.size() == 1) {
            out.push_back(*holders.front());
            continue;
        }
        rs.clear();
        sources.clear();
        for (const auto* h : holders) {
            rs.push_back(h->existence);
            sources.push_back({h->existence, h->density});
        }
        out.push_back({label, fuse_existence(rs), fuse_density(sources, cfg.merged_particle_count, rng)});
    }
    return LmbDensity{local.time(), local.owner(), std::move(out)};
}

} // namespace cofuse::fusion
