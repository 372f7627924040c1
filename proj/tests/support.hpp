#pragma once

#include <random>
#include <vector>

#include "cofuse/cofuse.hpp"

namespace support {

using namespace cofuse;

inline BernoulliComponent point_component(Label label, double r, double x, double y) {
    std::vector<KinematicState> s{{x, y, 0.0, 0.0, 0.0}};
    return {label, r, share(ParticleSet::uniform(s))};
}

/// Gaussian particle cloud around (x, y) with isotropic position spread.
inline BernoulliComponent cloud_component(Label label, double r, double x, double y, double spread, std::size_t n,
                                          Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<KinematicState> s(n);
    for (auto& k : s) k = {x + spread * g(rng), y + spread * g(rng), 0.0, 0.0, 0.0};
    return {label, r, share(ParticleSet::uniform(s))};
}

inline Label L(Time k, NodeId i, std::uint32_t m) { return Label{k, i, m}; }

inline scenario::ScenarioConfig empty_scenario(double half_width, Time scans) {
    scenario::ScenarioConfig sc;
    sc.name = "fixture";
    sc.area.min = {-half_width, -half_width};
    sc.area.max = {half_width, half_width};
    sc.dt = 0.1;
    sc.scans = scans;
    sc.tracker.motion.dt = sc.dt;
    return sc;
}

inline scenario::VehicleSpec straight_vehicle(VehicleId id, Time birth, Time death, double x0, double y0, double x1,
                                              double y1, double speed) {
    scenario::VehicleSpec v;
    v.id = id;
    v.birth = birth;
    v.death = death;
    v.waypoints = {{x0, y0, speed}, {x1, y1, speed}};
    return v;
}

inline scenario::SensorSpec fixed_sensor(NodeId node, double x, double y, double range, double comm_range,
                                         double pd = 0.95, double clutter = 10.0) {
    scenario::SensorSpec s;
    s.model.node = node;
    s.model.range = range;
    s.model.detection_prob = pd;
    s.model.clutter_rate = clutter;
    s.model.meas_noise_std = 1.0;
    s.model.mount = FixedMount{Eigen::Vector2d{x, y}};
    s.comm_range = comm_range;
    return s;
}

} // namespace support
