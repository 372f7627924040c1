#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/label.hpp"
#include "cofuse/dynamics/state.hpp"

namespace cofuse {

using VehicleId = std::uint32_t;

/// Sensor carried by a vehicle; its field of view follows the host's true position.
struct HostMount {
    VehicleId vehicle = 0;
};

/// Sensor at a fixed location.
struct FixedMount {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

using SensorMount = std::variant<HostMount, FixedMount>;

/// Omnidirectional range-limited position sensor.
struct SensorModel {
    NodeId node = 0;
    double range = 50.0;          ///< field-of-view radius, m
    double detection_prob = 0.95; ///< inside the field of view
    double clutter_rate = 10.0;   ///< Poisson mean per scan, uniform over the field of view
    double meas_noise_std = 1.0;  ///< m, isotropic
    SensorMount mount = FixedMount{};

    [[nodiscard]] std::optional<VehicleId> host() const {
        if (const auto* h = std::get_if<HostMount>(&mount)) return h->vehicle;
        return std::nullopt;
    }

    [[nodiscard]] double fov_area() const { return std::numbers::pi * range * range; }

    /// Clutter intensity per m^2 inside the field of view.
    [[nodiscard]] double clutter_density() const { return clutter_rate / fov_area(); }

    void validate() const {
        if (!(range > 0.0)) throw PreconditionError("SensorModel: range must be positive");
        if (!(detection_prob >= 0.0 && detection_prob <= 1.0))
            throw PreconditionError("SensorModel: detection_prob must lie in [0,1]");
        if (!(clutter_rate >= 0.0)) throw PreconditionError("SensorModel: clutter_rate must be non-negative");
        if (!(meas_noise_std >= 0.0)) throw PreconditionError("SensorModel: meas_noise_std must be non-negative");
    }
};

struct Measurement {
    double zx = 0.0;
    double zy = 0.0;
    Time time = 0;
    NodeId sensor = 0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Isotropic Gaussian position likelihood N(z; [px, py], sigma^2 I). Independent of the
/// field of view, which enters through detection_probability.
inline double measurement_likelihood(const Measurement& z, const KinematicState& x, const SensorModel& s) {
    if (z.sensor != s.node) throw PreconditionError("measurement_likelihood: measurement from a different sensor");
    const double var = s.meas_noise_std * s.meas_noise_std;
    if (!(var > 0.0)) throw PreconditionError("measurement_likelihood: meas_noise_std must be positive");
    const double dx = z.zx - x.px;
    const double dy = z.zy - x.py;
    return std::exp(-0.5 * (dx * dx + dy * dy) / var) / (2.0 * std::numbers::pi * var);
}

inline bool in_fov(double px, double py, const SensorModel& s, const Eigen::Vector2d& sensor_position) {
    const double dx = px - sensor_position.x();
    const double dy = py - sensor_position.y();
    return dx * dx + dy * dy <= s.range * s.range;
}

/// p_D inside the closed range disc, exactly zero outside.
inline double detection_probability(const KinematicState& x, const SensorModel& s, const Eigen::Vector2d& sensor_position) {
    return in_fov(x.px, x.py, s, sensor_position) ? s.detection_prob : 0.0;
}

} // namespace cofuse
