#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "cofuse/core/error.hpp"
#include "cofuse/core/label.hpp"
#include "cofuse/core/particle_set.hpp"

namespace cofuse {

/// One possibly existing object.
struct BernoulliComponent {
    Label label;
    double existence = 0.0;
    SharedParticles density;

    [[nodiscard]] const ParticleSet& particles() const {
        if (!density) throw PreconditionError("BernoulliComponent: missing particle set");
        return *density;
    }
};

/// Expected a posteriori state: the weighted average of the component's particles.
inline KinematicState eap_estimate(const BernoulliComponent& c) { return c.particles().mean(); }

/// Labeled multi-Bernoulli density owned by one node at one scan.
///
/// Components are kept sorted by label and labels are unique; iteration order is therefore
/// deterministic, which every seeded run depends on.
class LmbDensity {
public:
    LmbDensity() = default;

    LmbDensity(Time time, NodeId owner, std::vector<BernoulliComponent> components = {})
        : time_(time), owner_(owner), components_(std::move(components)) {
        std::sort(components_.begin(), components_.end(),
                  [](const auto& a, const auto& b) { return a.label < b.label; });
        for (std::size_t i = 0; i < components_.size(); ++i) {
            const auto& c = components_[i];
            if (i > 0 && components_[i - 1].label == c.label)
                throw InternalError("LmbDensity: duplicate label");
            if (!(c.existence >= 0.0 && c.existence <= 1.0))
                throw PreconditionError("LmbDensity: existence probability outside [0,1]");
            if (c.existence > 0.0 && (!c.density || c.density->empty()))
                throw PreconditionError("LmbDensity: component with positive existence has no particles");
        }
    }

    [[nodiscard]] Time time() const noexcept { return time_; }
    [[nodiscard]] NodeId owner() const noexcept { return owner_; }
    [[nodiscard]] const std::vector<BernoulliComponent>& components() const noexcept { return components_; }
    [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
    [[nodiscard]] bool empty() const noexcept { return components_.empty(); }

    [[nodiscard]] const BernoulliComponent* find(const Label& label) const {
        auto it = std::lower_bound(components_.begin(), components_.end(), label,
                                   [](const auto& c, const Label& l) { return c.label < l; });
        return (it != components_.end() && it->label == label) ? &*it : nullptr;
    }

    [[nodiscard]] bool contains(const Label& label) const { return find(label) != nullptr; }

    [[nodiscard]] std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(components_.size());
        for (const auto& c : components_) out.push_back(c.label);
        return out;
    }

    /// Sum of existence probabilities (mean cardinality).
    [[nodiscard]] double expected_cardinality() const {
        double s = 0.0;
        for (const auto& c : components_) s += c.existence;
        return s;
    }

private:
    Time time_ = 0;
    NodeId owner_ = 0;
    std::vector<BernoulliComponent> components_;
};

struct Estimate {
    Label label;
    KinematicState state;
};

/// Components whose existence strictly exceeds `threshold`, with their EAP states, in
/// label order.
inline std::vector<Estimate> extract_estimates(const LmbDensity& d, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("extract_estimates: threshold must lie in (0,1)");
    std::vector<Estimate> out;
    for (const auto& c : d.components()) {
        if (c.existence > threshold) out.push_back({c.label, eap_estimate(c)});
    }
    return out;
}

/// Keeps exactly the components with existence >= min_existence.
inline LmbDensity prune(const LmbDensity& d, double min_existence) {
    if (!(min_existence >= 0.0 && min_existence < 1.0)) throw DomainError("prune: min_existence must lie in [0,1)");
    std::vector<BernoulliComponent> kept;
    kept.reserve(d.size());
    for (const auto& c : d.components()) {
        if (c.existence >= min_existence) kept.push_back(c);
    }
    return LmbDensity{d.time(), d.owner(), std::move(kept)};
}

/// Keeps at most `max_components`, preferring higher existence (ties: older label).
inline LmbDensity cap_components(const LmbDensity& d, std::size_t max_components) {
    if (d.size() <= max_components) return d;
    std::vector<BernoulliComponent> cs = d.components();
    std::stable_sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.existence > b.existence; });
    cs.resize(max_components);
    return LmbDensity{d.time(), d.owner(), std::move(cs)};
}

} // namespace cofuse
