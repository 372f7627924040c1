#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/dynamics/sensor.hpp"
#include "cofuse/scenario/truth.hpp"

namespace cofuse::scenario {

/// Stream tag for measurement generation; combine as make_rng(seed, {kMeasurementStream, node, k}).
inline constexpr std::uint64_t kMeasurementStream = 0x6d656173ULL;

/// Uniform point on the closed disc of radius r around c.
inline Eigen::Vector2d sample_disc(const Eigen::Vector2d& c, double r, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double rho = r * std::sqrt(u(rng));
    const double phi = 2.0 * std::numbers::pi * u(rng);
    return c + rho * Eigen::Vector2d{std::cos(phi), std::sin(phi)};
}

/// One scan of sensor data: a noisy detection of each alive non-host vehicle with
/// probability p_D(x), plus Poisson clutter uniform on the field of view, in shuffled order.
inline std::vector<Measurement> simulate_scan(const GroundTruth& truth, Time k, const SensorModel& sensor,
                                              const Eigen::Vector2d& sensor_pos, Rng& rng) {
    if (k < 1 || k > truth.scans()) throw PreconditionError("simulate_scan: scan outside the horizon");
    sensor.validate();
    std::vector<Measurement> out;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto host = sensor.host();
    for (const auto& [id, x] : truth.at(k)) {
        if (host && *host == id) continue;
        const double pd = detection_probability(x, sensor, sensor_pos);
        if (!(u(rng) < pd)) continue;
        out.push_back({x.px + sensor.meas_noise_std * n(rng), x.py + sensor.meas_noise_std * n(rng), k, sensor.node});
    }
    if (sensor.clutter_rate > 0.0) {
        std::poisson_distribution<int> clutter(sensor.clutter_rate);
        const int count = clutter(rng);
        for (int c = 0; c < count; ++c) {
            const auto z = sample_disc(sensor_pos, sensor.range, rng);
            out.push_back({z.x(), z.y(), k, sensor.node});
        }
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

/// Scan generated from the (seed, node, k) stream; empty when the sensor's host is not alive.
inline std::vector<Measurement> simulate_scan(const GroundTruth& truth, Time k, const SensorModel& sensor,
                                              std::uint64_t seed) {
    const auto pos = sensor_position(truth, k, sensor);
    if (!pos) return {};
    Rng rng = make_rng(seed, {kMeasurementStream, sensor.node, static_cast<std::uint64_t>(k)});
    return simulate_scan(truth, k, sensor, *pos, rng);
}

} // namespace cofuse::scenario
