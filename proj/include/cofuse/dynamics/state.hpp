#pragma once

#include <cmath>

#include <Eigen/Core>

namespace cofuse {

/// Planar constant-turn state. Positions in m, velocities in m/s, turn rate in rad/s.
struct KinematicState {
    double px = 0.0;
    double py = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double omega = 0.0;

    [[nodiscard]] Eigen::Vector2d position() const { return {px, py}; }
    [[nodiscard]] double speed() const { return std::hypot(vx, vy); }
    [[nodiscard]] bool finite() const {
        return std::isfinite(px) && std::isfinite(py) && std::isfinite(vx) && std::isfinite(vy) &&
               std::isfinite(omega);
    }

    friend bool operator==(const KinematicState&, const KinematicState&) = default;
};

inline double planar_distance(const KinematicState& a, const KinematicState& b) {
    return std::hypot(a.px - b.px, a.py - b.py);
}

} // namespace cofuse
