#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "cofuse/core/error.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/dynamics/state.hpp"

namespace cofuse {

struct Particle {
    KinematicState state;
    double weight = 0.0;
};

/// Weighted particle approximation of a single-object density.
///
/// Immutable once built: the constructor normalizes the weights and caches the weighted
/// mean, so sets can be shared between components and nodes through `SharedParticles`.
class ParticleSet {
public:
    ParticleSet() = default;

    /// Takes ownership and normalizes. Throws PreconditionError on negative, non-finite or
    /// all-zero weights.
    explicit ParticleSet(std::vector<Particle> particles) : particles_(std::move(particles)) {
        if (particles_.empty()) return;
        double total = 0.0;
        for (const auto& p : particles_) {
            if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
                throw PreconditionError("ParticleSet: weights must be finite and non-negative");
            total += p.weight;
        }
        if (!(total > 0.0)) throw PreconditionError("ParticleSet: all particle weights are zero");
        for (auto& p : particles_) p.weight /= total;
        compute_mean();
    }

    /// Equal-weight set over the given states.
    static ParticleSet uniform(std::span<const KinematicState> states) {
        std::vector<Particle> ps;
        ps.reserve(states.size());
        const double w = states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size());
        for (const auto& s : states) ps.push_back({s, w});
        return ParticleSet{std::move(ps)};
    }

    [[nodiscard]] std::span<const Particle> particles() const noexcept { return particles_; }
    [[nodiscard]] std::size_t size() const noexcept { return particles_.size(); }
    [[nodiscard]] bool empty() const noexcept { return particles_.empty(); }

    /// Weighted mean (EAP) of the particles. Throws on an empty set.
    [[nodiscard]] const KinematicState& mean() const {
        if (particles_.empty()) throw PreconditionError("ParticleSet::mean: empty particle set");
        return mean_;
    }

    [[nodiscard]] double weight_sum() const noexcept {
        double s = 0.0;
        for (const auto& p : particles_) s += p.weight;
        return s;
    }

private:
    void compute_mean() {
        KinematicState m{};
        for (const auto& p : particles_) {
            m.px += p.weight * p.state.px;
            m.py += p.weight * p.state.py;
            m.vx += p.weight * p.state.vx;
            m.vy += p.weight * p.state.vy;
            m.omega += p.weight * p.state.omega;
        }
        mean_ = m;
    }

    std::vector<Particle> particles_;
    KinematicState mean_{};
};

using SharedParticles = std::shared_ptr<const ParticleSet>;

inline SharedParticles share(ParticleSet set) { return std::make_shared<const ParticleSet>(std::move(set)); }

/// Systematic resampling of arbitrary non-negative weights to `target_count` equally
/// weighted particles. The weights need not be normalized.
inline ParticleSet resample(std::span<const Particle> particles, std::size_t target_count, Rng& rng) {
    if (target_count == 0) throw PreconditionError("resample: target_count must be at least 1");
    double total = 0.0;
    for (const auto& p : particles) {
        if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
            throw PreconditionError("resample: weights must be finite and non-negative");
        total += p.weight;
    }
    if (particles.empty() || !(total > 0.0)) throw PreconditionError("resample: all weights are zero");

    const double step = total / static_cast<double>(target_count);
    std::uniform_real_distribution<double> u(0.0, step);
    double pointer = u(rng);
    const double w = 1.0 / static_cast<double>(target_count);

    std::vector<Particle> out;
    out.reserve(target_count);
    std::size_t i = 0;
    double cumulative = particles[0].weight;
    for (std::size_t n = 0; n < target_count; ++n) {
        while (pointer >= cumulative && i + 1 < particles.size()) {
            ++i;
            cumulative += particles[i].weight;
        }
        // Never land on a zero-weight particle at the tail because of rounding.
        std::size_t pick = i;
        while (particles[pick].weight == 0.0 && pick > 0) --pick;
        out.push_back({particles[pick].state, w});
        pointer += step;
    }
    return ParticleSet{std::move(out)};
}

inline ParticleSet resample(const ParticleSet& set, std::size_t target_count, Rng& rng) {
    return resample(set.particles(), target_count, rng);
}

} // namespace cofuse
