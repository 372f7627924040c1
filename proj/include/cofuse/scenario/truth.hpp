#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/dynamics/state.hpp"
#include "cofuse/scenario/config.hpp"

namespace cofuse::scenario {

/// Arc-length parameterized planar path: straight segments joined by circular fillets.
class WaypointPath {
public:
    struct Sample {
        Eigen::Vector2d position;
        Eigen::Vector2d heading; ///< unit tangent
        double speed = 0.0;
        double curvature = 0.0; ///< signed, 1/m, positive counter-clockwise
    };

    /// Throws ConfigError naming `where` when a corner cannot be rounded with a radius of at
    /// least `min_radius`.
    WaypointPath(const std::vector<Waypoint>& wps, bool loop, double radius, double min_radius,
                 const std::string& where)
        : loop_(loop) {
        const std::size_t n = wps.size();
        if (n < 2) throw ConfigError(where + ": at least two waypoints required");
        std::vector<Eigen::Vector2d> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = {wps[i].x, wps[i].y};
        const std::size_t segs = loop ? n : n - 1;
        for (std::size_t s = 0; s < segs; ++s)
            if ((p[(s + 1) % n] - p[s]).norm() <= 0.0)
                throw ConfigError(where + ".waypoints[" + std::to_string(s + 1) + "]: repeats the previous waypoint");

        // Corner j joins segment j-1 (speed of waypoint j-1) and segment j (speed of waypoint j).
        struct Corner {
            bool present = false;
            Eigen::Vector2d in, out, center;
            double radius = 0.0, start_angle = 0.0, sweep = 0.0;
        };
        std::vector<Corner> corners(n);
        auto seg_len = [&](std::size_t s) { return (p[(s + 1) % n] - p[s]).norm(); };
        for (std::size_t j = 0; j < n; ++j) {
            if (!loop && (j == 0 || j == n - 1)) continue;
            const std::size_t prev = (j + n - 1) % n;
            const Eigen::Vector2d d_in = (p[j] - p[prev]).normalized();
            const Eigen::Vector2d d_out = (p[(j + 1) % n] - p[j]).normalized();
            const double cross = d_in.x() * d_out.y() - d_in.y() * d_out.x();
            const double phi = std::atan2(cross, d_in.dot(d_out));
            if (std::abs(phi) < 1e-9) continue;
            const double half_tan = std::tan(std::abs(phi) / 2.0);
            const double room = std::min(seg_len(prev), seg_len(j)) / 2.0;
            double r = radius;
            if (r * half_tan > room) r = room / half_tan;
            if (!(r >= min_radius) || !std::isfinite(half_tan))
                throw ConfigError(where + ".waypoints[" + std::to_string(j) + "]: turn needs radius " +
                                  std::to_string(r) + " m, below the minimum " + std::to_string(min_radius) + " m");
            Corner c;
            c.present = true;
            c.radius = r;
            const double t = r * half_tan;
            c.in = p[j] - t * d_in;
            c.out = p[j] + t * d_out;
            const double side = phi > 0.0 ? 1.0 : -1.0;
            const Eigen::Vector2d normal{-d_in.y() * side, d_in.x() * side};
            c.center = c.in + r * normal;
            c.start_angle = std::atan2(c.in.y() - c.center.y(), c.in.x() - c.center.x());
            c.sweep = phi;
            corners[j] = c;
        }

        auto add_line = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, double v) {
            const double len = (b - a).norm();
            if (len <= 0.0) return;
            pieces_.push_back(Piece{false, a, (b - a) / len, len, v, v, {}, 0.0, 0.0, 0.0});
        };
        auto add_arc = [&](const Corner& c, double v0, double v1) {
            pieces_.push_back(Piece{true, c.in, {}, c.radius * std::abs(c.sweep), v0, v1, c.center, c.radius,
                                    c.start_angle, c.sweep});
        };
        auto start_of = [&](std::size_t j) { return corners[j].present ? corners[j].out : p[j]; };
        auto end_of = [&](std::size_t j) { return corners[j].present ? corners[j].in : p[j]; };

        for (std::size_t s = 0; s < segs; ++s) {
            const std::size_t next = (s + 1) % n;
            add_line(start_of(s), end_of(next), wps[s].speed);
            if (corners[next].present) add_arc(corners[next], wps[s].speed, wps[next].speed);
        }
        for (const auto& pc : pieces_) length_ += pc.length;
    }

    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] bool loop() const { return loop_; }

    /// Sample at arc length s. Non-looping paths clamp to their end point with zero speed.
    [[nodiscard]] Sample at(double s) const {
        if (loop_) {
            s = std::fmod(s, length_);
            if (s < 0.0) s += length_;
        } else if (s >= length_) {
            const Piece& last = pieces_.back();
            Sample end = sample_piece(last, last.length);
            end.speed = 0.0;
            end.curvature = 0.0;
            return end;
        }
        s = std::max(s, 0.0);
        for (const auto& pc : pieces_) {
            if (s <= pc.length) return sample_piece(pc, s);
            s -= pc.length;
        }
        return sample_piece(pieces_.back(), pieces_.back().length);
    }

    [[nodiscard]] double max_speed() const {
        double v = 0.0;
        for (const auto& pc : pieces_) v = std::max({v, pc.v0, pc.v1});
        return v;
    }

private:
    struct Piece {
        bool arc;
        Eigen::Vector2d start, dir;
        double length, v0, v1;
        Eigen::Vector2d center;
        double radius, start_angle, sweep;
    };

    static Sample sample_piece(const Piece& pc, double s) {
        Sample out;
        const double f = pc.length > 0.0 ? s / pc.length : 0.0;
        out.speed = pc.v0 + (pc.v1 - pc.v0) * f;
        if (!pc.arc) {
            out.position = pc.start + s * pc.dir;
            out.heading = pc.dir;
            return out;
        }
        const double side = pc.sweep > 0.0 ? 1.0 : -1.0;
        const double ang = pc.start_angle + side * s / pc.radius;
        out.position = pc.center + pc.radius * Eigen::Vector2d{std::cos(ang), std::sin(ang)};
        out.heading = side * Eigen::Vector2d{-std::sin(ang), std::cos(ang)};
        out.curvature = side / pc.radius;
        return out;
    }

    std::vector<Piece> pieces_;
    double length_ = 0.0;
    bool loop_ = false;
};

class GroundTruth {
public:
    using ScanStates = std::map<VehicleId, KinematicState>;

    GroundTruth(double dt, Time scans) : dt_(dt), scans_(static_cast<std::size_t>(scans)) {}

    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] Time scans() const { return static_cast<Time>(scans_.size()); }

    /// Alive vehicles at scan k (1-based); empty outside the horizon.
    [[nodiscard]] const ScanStates& at(Time k) const {
        static const ScanStates none;
        if (k < 1 || k > scans()) return none;
        return scans_[static_cast<std::size_t>(k - 1)];
    }

    [[nodiscard]] std::optional<KinematicState> state(Time k, VehicleId id) const {
        const auto& s = at(k);
        auto it = s.find(id);
        if (it == s.end()) return std::nullopt;
        return it->second;
    }

    void set(Time k, VehicleId id, const KinematicState& x) {
        if (k < 1 || k > scans()) throw PreconditionError("GroundTruth::set: scan outside the horizon");
        scans_[static_cast<std::size_t>(k - 1)][id] = x;
    }

private:
    double dt_;
    std::vector<ScanStates> scans_;
};

/// Deterministic truth: each vehicle advances along its path at the path speed profile,
/// integrated with the midpoint rule. Turn rate is speed times curvature.
inline GroundTruth generate_truth(const ScenarioConfig& cfg) {
    GroundTruth truth(cfg.dt, cfg.scans);
    for (std::size_t i = 0; i < cfg.vehicles.size(); ++i) {
        const auto& v = cfg.vehicles[i];
        const std::string where = "vehicles[" + std::to_string(i) + "]";
        const WaypointPath path(v.waypoints, v.loop, v.turn_radius, cfg.min_turn_radius, where);
        if (!v.loop && v.start_offset >= path.length())
            throw ConfigError(where + ".start_offset: beyond the end of the path");
        double s = v.start_offset;
        for (Time k = v.birth; k <= v.death; ++k) {
            const auto smp = path.at(s);
            if (!v.loop && s >= path.length() && k > v.birth)
                throw ConfigError(where + ": path ends before the death scan " + std::to_string(v.death));
            KinematicState x;
            x.px = smp.position.x();
            x.py = smp.position.y();
            x.vx = smp.speed * smp.heading.x();
            x.vy = smp.speed * smp.heading.y();
            x.omega = smp.speed * smp.curvature;
            truth.set(k, v.id, x);
            const double half = path.at(s + 0.5 * cfg.dt * smp.speed).speed;
            s += cfg.dt * half;
        }
    }
    return truth;
}

/// Position of the sensor at scan k, or nullopt when its host vehicle is not alive.
inline std::optional<Eigen::Vector2d> sensor_position(const GroundTruth& truth, Time k, const SensorModel& sensor) {
    if (const auto* f = std::get_if<FixedMount>(&sensor.mount)) return f->position;
    const auto host = truth.state(k, std::get<HostMount>(sensor.mount).vehicle);
    if (!host) return std::nullopt;
    return host->position();
}

/// Ground-truth objects a node is evaluated against: every alive vehicle except its host.
inline GroundTruth::ScanStates visible_truth(const GroundTruth& truth, Time k, const SensorModel& sensor) {
    auto out = truth.at(k);
    if (const auto host = sensor.host()) out.erase(*host);
    return out;
}

inline void write_truth_csv(std::ostream& os, const GroundTruth& truth) {
    os << "scan,vehicle_id,px,py,vx,vy,omega\n";
    os << std::fixed << std::setprecision(6);
    for (Time k = 1; k <= truth.scans(); ++k)
        for (const auto& [id, x] : truth.at(k))
            os << k << ',' << id << ',' << x.px << ',' << x.py << ',' << x.vx << ',' << x.vy << ',' << x.omega << '\n';
}

inline void write_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    write_truth_csv(f, truth);
}

} // namespace cofuse::scenario
