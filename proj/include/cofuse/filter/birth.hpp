#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"
#include "cofuse/core/random.hpp"

namespace cofuse::filter {

struct BirthConfig {
    std::uint32_t rim_points = 16;  ///< M, equally spaced on the field-of-view rim
    double existence = 0.05;        ///< r_B
    double position_std = 5.0;      ///< m, around each rim point
    double velocity_limit = 15.0;   ///< m/s, velocities uniform in [-limit, limit] per axis
    std::size_t particles = 1000;

    void validate() const {
        if (rim_points < 1) throw PreconditionError("BirthConfig: rim_points must be at least 1");
        if (!(existence > 0.0 && existence < 1.0)) throw PreconditionError("BirthConfig: existence must lie in (0,1)");
        if (!(position_std >= 0.0)) throw PreconditionError("BirthConfig: position_std must be non-negative");
        if (!(velocity_limit >= 0.0)) throw PreconditionError("BirthConfig: velocity_limit must be non-negative");
        if (particles < 1) throw PreconditionError("BirthConfig: particles must be at least 1");
    }
};

/// Births placed around the rim of a node's field of view. Particles are drawn from a
/// Gaussian around each rim point truncated to the closed disc, so every birth particle
/// is detectable on its first scan.
class BirthModel {
public:
    BirthModel(BirthConfig cfg, double fov_range) : cfg_(cfg), range_(fov_range) {
        cfg_.validate();
        if (!(range_ > 0.0)) throw PreconditionError("BirthModel: field-of-view range must be positive");
    }

    [[nodiscard]] const BirthConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::uint32_t count() const noexcept { return cfg_.rim_points; }
    [[nodiscard]] double range() const noexcept { return range_; }

    /// Rim point for birth index m in 1..M.
    [[nodiscard]] Eigen::Vector2d rim_point(std::uint32_t m, const Eigen::Vector2d& center) const {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m - 1) / static_cast<double>(cfg_.rim_points);
        return center + range_ * Eigen::Vector2d{std::cos(angle), std::sin(angle)};
    }

    /// The M birth components for scan `k` at `node`, labeled per `mode`.
    [[nodiscard]] std::vector<BernoulliComponent> spawn(Time k, NodeId node, LabelMode mode,
                                                        const Eigen::Vector2d& center, Rng& rng) const {
        std::normal_distribution<double> n01(0.0, 1.0);
        std::uniform_real_distribution<double> vel(-cfg_.velocity_limit, cfg_.velocity_limit);
        const NodeId origin = (mode == LabelMode::NodeExtended) ? node : kNoOrigin;

        std::vector<BernoulliComponent> out;
        out.reserve(cfg_.rim_points);
        std::vector<KinematicState> states(cfg_.particles);
        for (std::uint32_t m = 1; m <= cfg_.rim_points; ++m) {
            const Eigen::Vector2d rim = rim_point(m, center);
            for (auto& s : states) {
                Eigen::Vector2d p = rim;
                bool inside = false;
                for (int attempt = 0; attempt < 64 && !inside; ++attempt) {
                    p = rim + cfg_.position_std * Eigen::Vector2d{n01(rng), n01(rng)};
                    inside = (p - center).squaredNorm() <= range_ * range_;
                }
                if (!inside) {
                    // Project back onto the disc; reached only with a tiny or zero position_std.
                    const Eigen::Vector2d d = p - center;
                    const double n = d.norm();
                    p = n > 0.0 ? Eigen::Vector2d(center + d * (range_ * (1.0 - 1e-12) / n)) : center;
                }
                s = KinematicState{p.x(), p.y(), vel(rng), vel(rng), 0.0};
            }
            out.push_back({Label{k, origin, m}, cfg_.existence, share(ParticleSet::uniform(states))});
        }
        return out;
    }

private:
    BirthConfig cfg_;
    double range_;
};

} // namespace cofuse::filter
