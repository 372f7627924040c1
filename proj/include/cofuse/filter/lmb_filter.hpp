#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/odds.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/dynamics/ct_model.hpp"
#include "cofuse/dynamics/sensor.hpp"
#include "cofuse/filter/association.hpp"
#include "cofuse/filter/birth.hpp"

namespace cofuse::filter {

struct FilterConfig {
    std::size_t particles_per_component = 1000;
    double prune_threshold = 1e-3;
    double extraction_threshold = 0.9;
    std::size_t max_components = 100;
    AssociationOptions association{};
    /// Survival probability for particles predicted outside the node's own field of view.
    /// Unset means the motion model's survival_prob applies everywhere.
    std::optional<double> exit_survival_prob;

    void validate() const {
        if (particles_per_component < 1) throw PreconditionError("FilterConfig: particles_per_component must be >= 1");
        if (!(prune_threshold > 0.0 && prune_threshold < 1.0))
            throw PreconditionError("FilterConfig: prune_threshold must lie in (0,1)");
        if (!(extraction_threshold > 0.0 && extraction_threshold < 1.0))
            throw PreconditionError("FilterConfig: extraction_threshold must lie in (0,1)");
        if (max_components < 1) throw PreconditionError("FilterConfig: max_components must be >= 1");
        if (association.max_events < 1) throw PreconditionError("FilterConfig: association budget must be >= 1");
        if (exit_survival_prob && !(*exit_survival_prob >= 0.0 && *exit_survival_prob <= 1.0))
            throw PreconditionError("FilterConfig: exit_survival_prob must lie in [0,1]");
    }
};

/// State-dependent survival: particles predicted outside the disc survive with
/// `outside_prob` instead of the motion model's survival probability.
struct SurvivalRegion {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double range = 0.0;
    double outside_prob = 1.0;
};

struct PredictOptions {
    LabelMode label_mode = LabelMode::NodeExtended;
    Eigen::Vector2d birth_center = Eigen::Vector2d::Zero();
    std::optional<SurvivalRegion> survival_region;
    bool include_births = true;
};

/// Prediction: survivors are propagated through the noisy constant-turn model with their
/// existence scaled by the (mean) survival probability; the M births of scan `k_next`
/// are appended.
inline LmbDensity predict(const LmbDensity& prior, const CtModelParams& motion, const BirthModel& birth, Time k_next,
                          NodeId node, Rng& rng, const PredictOptions& opts = {}) {
    motion.validate();
    if (prior.time() != k_next - 1) throw PreconditionError("predict: prior must be one scan before k_next");

    std::vector<BernoulliComponent> out;
    out.reserve(prior.size() + birth.count());
    std::vector<Particle> moved;
    for (const auto& c : prior.components()) {
        const auto ps = c.particles().particles();
        moved.clear();
        moved.reserve(ps.size());
        double survival_mass = 0.0;
        for (const auto& p : ps) {
            KinematicState x = ct_transition(p.state, motion, true, rng);
            double ps_x = motion.survival_prob;
            if (opts.survival_region) {
                const auto& reg = *opts.survival_region;
                const double dx = x.px - reg.center.x();
                const double dy = x.py - reg.center.y();
                if (dx * dx + dy * dy > reg.range * reg.range) ps_x = reg.outside_prob;
            }
            survival_mass += p.weight * ps_x;
            moved.push_back({x, p.weight * ps_x});
        }
        const double r = clamp_existence(c.existence * survival_mass);
        if (survival_mass <= 0.0) {
            for (auto& p : moved) p.weight = 1.0;
        }
        out.push_back({c.label, r, share(ParticleSet{std::move(moved)})});
        moved = {};
    }
    if (opts.include_births) {
        for (auto& b : birth.spawn(k_next, node, opts.label_mode, opts.birth_center, rng)) {
            if (prior.contains(b.label)) throw InternalError("predict: birth label collides with an existing label");
            out.push_back(std::move(b));
        }
    }
    return LmbDensity{k_next, node, std::move(out)};
}

namespace detail {

inline constexpr double kGateSigmas = 6.0;
// Floor for the clutter intensity so clutter-free scenes stay numerically defined.
inline constexpr double kMinClutterDensity = 1e-300;

struct ComponentTerms {
    std::vector<double> pd;                 // per particle
    double miss_mass = 0.0;                 // <p, 1 - pD>
    std::vector<int> gated;                 // measurement indices with nonzero likelihood
    std::vector<std::vector<double>> lik;   // per gated measurement, per particle pD * g
    std::vector<double> lik_mass;           // per gated measurement, <p, pD g>
};

/// Union-find over components [0, n) and measurements [n, n + m).
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace detail

/// Measurement update. Association events between components and measurements are
/// weighted by clutter-normalized likelihoods, then marginalized back to per-label
/// existence probabilities and reweighted particle mixtures. The label set is unchanged
/// and no particles are resampled here (see `bookkeep`).
inline LmbDensity update(const LmbDensity& predicted, std::span<const Measurement> scan, const SensorModel& sensor,
                         const Eigen::Vector2d& sensor_position, const AssociationOptions& assoc, Rng& rng) {
    sensor.validate();
    for (const auto& z : scan) {
        if (z.sensor != sensor.node) throw PreconditionError("update: measurement from a different sensor");
        if (z.time != predicted.time()) throw PreconditionError("update: measurement from a different scan");
    }

    const auto& comps = predicted.components();
    const std::size_t n = comps.size();
    const std::size_t m = scan.size();
    const double kappa = std::max(sensor.clutter_density(), detail::kMinClutterDensity);
    const double sigma = sensor.meas_noise_std;
    const double gate = detail::kGateSigmas * sigma;

    std::vector<detail::ComponentTerms> terms(n);
    std::vector<double> miss(n, 1.0);
    detail::DisjointSets sets(n + m);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = comps[i];
        auto& t = terms[i];
        if (!c.density || c.density->empty()) {
            miss[i] = 1.0;
            continue;
        }
        const auto ps = c.density->particles();
        t.pd.resize(ps.size());
        double min_x = ps[0].state.px, max_x = min_x, min_y = ps[0].state.py, max_y = min_y;
        for (std::size_t p = 0; p < ps.size(); ++p) {
            const auto& s = ps[p].state;
            t.pd[p] = detection_probability(s, sensor, sensor_position);
            t.miss_mass += ps[p].weight * (1.0 - t.pd[p]);
            min_x = std::min(min_x, s.px);
            max_x = std::max(max_x, s.px);
            min_y = std::min(min_y, s.py);
            max_y = std::max(max_y, s.py);
        }
        miss[i] = 1.0 - c.existence + c.existence * t.miss_mass;
        if (c.existence <= 0.0) continue;

        for (std::size_t j = 0; j < m; ++j) {
            const auto& z = scan[j];
            if (z.zx < min_x - gate || z.zx > max_x + gate || z.zy < min_y - gate || z.zy > max_y + gate) continue;
            std::vector<double> lik(ps.size(), 0.0);
            double mass = 0.0;
            for (std::size_t p = 0; p < ps.size(); ++p) {
                if (t.pd[p] <= 0.0) continue;
                lik[p] = t.pd[p] * measurement_likelihood(z, ps[p].state, sensor);
                mass += ps[p].weight * lik[p];
            }
            if (!(mass > 0.0)) continue;
            t.gated.push_back(static_cast<int>(j));
            t.lik.push_back(std::move(lik));
            t.lik_mass.push_back(mass);
            sets.unite(i, n + j);
        }
    }

    // Independent clusters of components sharing gated measurements.
    std::vector<std::vector<std::size_t>> clusters;
    {
        std::vector<std::ptrdiff_t> slot(n + m, -1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t root = sets.find(i);
            if (slot[root] < 0) {
                slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
                clusters.emplace_back();
            }
            clusters[static_cast<std::size_t>(slot[root])].push_back(i);
        }
    }

    std::vector<double> w_miss(n, 1.0);
    std::vector<std::vector<double>> w_assign(n);
    for (std::size_t i = 0; i < n; ++i) w_assign[i].assign(terms[i].gated.size(), 0.0);

    for (const auto& cluster : clusters) {
        std::vector<int> meas;
        for (auto i : cluster)
            for (int j : terms[i].gated) meas.push_back(j);
        std::sort(meas.begin(), meas.end());
        meas.erase(std::unique(meas.begin(), meas.end()), meas.end());
        if (meas.empty()) continue;

        AssociationProblem prob;
        prob.miss.resize(cluster.size());
        prob.assign = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cluster.size()), static_cast<Eigen::Index>(meas.size()));
        for (std::size_t a = 0; a < cluster.size(); ++a) {
            const auto i = cluster[a];
            prob.miss[a] = miss[i];
            for (std::size_t g = 0; g < terms[i].gated.size(); ++g) {
                const auto col = std::lower_bound(meas.begin(), meas.end(), terms[i].gated[g]) - meas.begin();
                prob.assign(static_cast<Eigen::Index>(a), col) = comps[i].existence * terms[i].lik_mass[g] / kappa;
            }
        }
        const auto result = enumerate_associations(prob, assoc, rng);
        const auto marg = marginalize(prob, result);
        for (std::size_t a = 0; a < cluster.size(); ++a) {
            const auto i = cluster[a];
            w_miss[i] = marg.miss[a];
            for (std::size_t g = 0; g < terms[i].gated.size(); ++g) {
                const auto col = std::lower_bound(meas.begin(), meas.end(), terms[i].gated[g]) - meas.begin();
                w_assign[i][g] = marg.assign(static_cast<Eigen::Index>(a), col);
            }
        }
    }

    std::vector<BernoulliComponent> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = comps[i];
        const auto& t = terms[i];
        if (!c.density || c.density->empty() || c.existence <= 0.0) {
            out.push_back(c);
            continue;
        }
        // Existence given that the component took no measurement.
        const double r_miss = miss[i] > 0.0 ? c.existence * t.miss_mass / miss[i] : 0.0;
        double r_post = w_miss[i] * r_miss;
        for (double w : w_assign[i]) r_post += w;

        const double miss_coeff = t.miss_mass > 0.0 ? w_miss[i] * r_miss / t.miss_mass : 0.0;
        const auto ps = c.density->particles();
        std::vector<Particle> reweighted(ps.begin(), ps.end());
        double total = 0.0;
        for (std::size_t p = 0; p < ps.size(); ++p) {
            double f = miss_coeff * (1.0 - t.pd[p]);
            for (std::size_t g = 0; g < t.gated.size(); ++g) {
                if (w_assign[i][g] > 0.0) f += w_assign[i][g] * t.lik[g][p] / t.lik_mass[g];
            }
            reweighted[p].weight = ps[p].weight * f;
            total += reweighted[p].weight;
        }
        if (!std::isfinite(r_post) || !std::isfinite(total)) throw NumericalError("update: non-finite posterior");
        r_post = std::clamp(r_post, 0.0, 1.0);
        if (total > 0.0) {
            out.push_back({c.label, r_post, share(ParticleSet{std::move(reweighted)})});
        } else {
            out.push_back({c.label, 0.0, c.density});
        }
    }
    return LmbDensity{predicted.time(), predicted.owner(), std::move(out)};
}

/// Prune, cap and resample every surviving component.
inline LmbDensity bookkeep(const LmbDensity& posterior, const FilterConfig& cfg, Rng& rng) {
    const LmbDensity kept = cap_components(prune(posterior, cfg.prune_threshold), cfg.max_components);
    std::vector<BernoulliComponent> out;
    out.reserve(kept.size());
    for (const auto& c : kept.components()) {
        out.push_back({c.label, c.existence, share(resample(c.particles(), cfg.particles_per_component, rng))});
    }
    return LmbDensity{kept.time(), kept.owner(), std::move(out)};
}

/// A node's local SMC-LMB filter. The posterior it carries is the node's own recursion;
/// fused posteriors produced by consensus are kept outside the filter.
class LmbFilter {
public:
    LmbFilter(NodeId node, FilterConfig cfg, CtModelParams motion, BirthModel birth, SensorModel sensor,
              LabelMode label_mode, Time start_time)
        : node_(node),
          cfg_(cfg),
          motion_(motion),
          birth_(std::move(birth)),
          sensor_(std::move(sensor)),
          label_mode_(label_mode),
          posterior_(start_time, node) {
        cfg_.validate();
        motion_.validate();
        sensor_.validate();
    }

    [[nodiscard]] NodeId node() const noexcept { return node_; }
    [[nodiscard]] const LmbDensity& posterior() const noexcept { return posterior_; }
    [[nodiscard]] const FilterConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const SensorModel& sensor() const noexcept { return sensor_; }

    /// predict -> update -> bookkeeping for scan `k`.
    const LmbDensity& step(Time k, const Eigen::Vector2d& sensor_position, std::span<const Measurement> scan, Rng& rng) {
        PredictOptions opts;
        opts.label_mode = label_mode_;
        opts.birth_center = sensor_position;
        if (cfg_.exit_survival_prob) opts.survival_region = SurvivalRegion{sensor_position, sensor_.range, *cfg_.exit_survival_prob};
        const LmbDensity predicted = predict(posterior_, motion_, birth_, k, node_, rng, opts);
        const LmbDensity updated = update(predicted, scan, sensor_, sensor_position, cfg_.association, rng);
        posterior_ = bookkeep(updated, cfg_, rng);
        return posterior_;
    }

private:
    NodeId node_;
    FilterConfig cfg_;
    CtModelParams motion_;
    BirthModel birth_;
    SensorModel sensor_;
    LabelMode label_mode_;
    LmbDensity posterior_;
};

} // namespace cofuse::filter
