#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "cofuse/core/error.hpp"
#include "cofuse/dynamics/ct_model.hpp"
#include "cofuse/dynamics/sensor.hpp"
#include "cofuse/filter/birth.hpp"
#include "cofuse/filter/lmb_filter.hpp"

namespace cofuse::scenario {

inline constexpr const char* kScenarioSchema = "cofuse.scenario";
inline constexpr int kScenarioVersion = 1;

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0; ///< m/s on the segment leaving this waypoint
};

struct VehicleSpec {
    VehicleId id = 0;
    std::vector<Waypoint> waypoints;
    Time birth = 1; ///< first scan present
    Time death = 1; ///< last scan present
    bool loop = false;
    double turn_radius = 10.0;  ///< requested corner radius, shrunk to fit short segments
    double start_offset = 0.0;  ///< m along the path at the birth scan
};

struct SensorSpec {
    SensorModel model;
    double comm_range = 100.0;
    std::optional<std::uint32_t> birth_rim_points; ///< overrides the tracker default for this sensor
};

struct Area {
    Eigen::Vector2d min{0.0, 0.0};
    Eigen::Vector2d max{200.0, 200.0};

    [[nodiscard]] bool contains(double x, double y) const {
        return x >= min.x() && x <= max.x() && y >= min.y() && y <= max.y();
    }
};

/// Tracker settings carried by a scenario so that an experiment is reproducible from the
/// scenario file, the mode, and the seed alone.
struct TrackerSettings {
    CtModelParams motion{};
    filter::BirthConfig birth{};
    filter::FilterConfig filter{};
    double merge_distance = 2.0;
};

struct ScenarioConfig {
    std::string name;
    Area area{};
    double dt = 0.1;
    Time scans = 1;
    std::uint64_t seed = 1;
    double min_turn_radius = 2.0;
    std::vector<VehicleSpec> vehicles;
    std::vector<SensorSpec> sensors;
    TrackerSettings tracker{};

    [[nodiscard]] const VehicleSpec* vehicle(VehicleId id) const {
        for (const auto& v : vehicles)
            if (v.id == id) return &v;
        return nullptr;
    }
};

namespace detail {

using nlohmann::json;

class Reader {
public:
    static const json& require(const json& obj, const std::string& path, const char* key) {
        if (!obj.is_object()) throw ParseError(path, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) throw ParseError(join(path, key), "missing field");
        return *it;
    }

    static const json* optional(const json& obj, const char* key) {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    static double real(const json& v, const std::string& path) {
        if (!v.is_number()) throw ParseError(path, "expected a number");
        return v.get<double>();
    }

    static std::int64_t integer(const json& v, const std::string& path) {
        if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
        return v.get<std::int64_t>();
    }

    static Eigen::Vector2d point(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) throw ParseError(path, "expected [x, y]");
        return {real(v[0], path + "[0]"), real(v[1], path + "[1]")};
    }

    static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

    static void real_if(const json& obj, const std::string& path, const char* key, double& out) {
        if (const auto* v = optional(obj, key)) out = real(*v, join(path, key));
    }
};

inline void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ParseError(path, what);
}

inline SensorModel sensor_defaults(const json& doc) {
    SensorModel s;
    if (const auto* d = Reader::optional(doc, "sensor_defaults")) {
        Reader::real_if(*d, "sensor_defaults", "detection_prob", s.detection_prob);
        Reader::real_if(*d, "sensor_defaults", "clutter_rate", s.clutter_rate);
        Reader::real_if(*d, "sensor_defaults", "meas_noise_std", s.meas_noise_std);
    }
    return s;
}

inline TrackerSettings tracker_settings(const json& doc) {
    TrackerSettings t;
    const auto* tr = Reader::optional(doc, "tracker");
    if (!tr) return t;
    const std::string p = "tracker";
    Reader::real_if(*tr, p, "sigma_accel", t.motion.sigma_accel);
    if (const auto* v = Reader::optional(*tr, "sigma_turn_deg")) t.motion.sigma_turn = Reader::real(*v, p + ".sigma_turn_deg") * std::numbers::pi / 180.0;
    Reader::real_if(*tr, p, "survival_prob", t.motion.survival_prob);
    if (const auto* v = Reader::optional(*tr, "exit_survival_prob")) t.filter.exit_survival_prob = Reader::real(*v, p + ".exit_survival_prob");
    Reader::real_if(*tr, p, "birth_existence", t.birth.existence);
    Reader::real_if(*tr, p, "birth_position_std", t.birth.position_std);
    Reader::real_if(*tr, p, "birth_velocity_limit", t.birth.velocity_limit);
    if (const auto* v = Reader::optional(*tr, "birth_rim_points")) {
        const auto m = Reader::integer(*v, p + ".birth_rim_points");
        check(m >= 1, p + ".birth_rim_points", "must be at least 1");
        t.birth.rim_points = static_cast<std::uint32_t>(m);
    }
    Reader::real_if(*tr, p, "prune_threshold", t.filter.prune_threshold);
    Reader::real_if(*tr, p, "extraction_threshold", t.filter.extraction_threshold);
    if (const auto* v = Reader::optional(*tr, "max_components")) {
        const auto m = Reader::integer(*v, p + ".max_components");
        check(m >= 1, p + ".max_components", "must be at least 1");
        t.filter.max_components = static_cast<std::size_t>(m);
    }
    Reader::real_if(*tr, p, "merge_distance", t.merge_distance);

    try {
        t.motion.validate();
        t.birth.validate();
        t.filter.validate();
    } catch (const PreconditionError& e) {
        throw ParseError(p, e.what());
    }
    check(t.merge_distance > 0.0, p + ".merge_distance", "must be positive");
    return t;
}

} // namespace detail

/// Parses a scenario document (JSON text). Violations are reported as ParseError with the
/// offending field path, e.g. "vehicles[2].death".
inline ScenarioConfig parse_scenario(const std::string& text) {
    using detail::check;
    using detail::Reader;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("", std::string("malformed scenario: ") + e.what());
    }

    const auto& schema = Reader::require(doc, "", "schema");
    check(schema.is_string() && schema.get<std::string>() == kScenarioSchema, "schema", "unknown schema");
    check(Reader::integer(Reader::require(doc, "", "version"), "version") == kScenarioVersion, "version",
          "unsupported scenario version");

    ScenarioConfig cfg;
    if (const auto* n = Reader::optional(doc, "name")) cfg.name = n->is_string() ? n->get<std::string>() : "";
    const auto& area = Reader::require(doc, "", "area");
    cfg.area.min = Reader::point(Reader::require(area, "area", "min"), "area.min");
    cfg.area.max = Reader::point(Reader::require(area, "area", "max"), "area.max");
    check(cfg.area.min.x() < cfg.area.max.x() && cfg.area.min.y() < cfg.area.max.y(), "area", "min must be below max");

    cfg.dt = Reader::real(Reader::require(doc, "", "dt"), "dt");
    check(cfg.dt > 0.0, "dt", "must be positive");
    cfg.scans = Reader::integer(Reader::require(doc, "", "scans"), "scans");
    check(cfg.scans >= 1, "scans", "must be at least 1");
    if (const auto* s = Reader::optional(doc, "seed")) {
        const auto seed = Reader::integer(*s, "seed");
        check(seed >= 0, "seed", "must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    Reader::real_if(doc, "", "min_turn_radius", cfg.min_turn_radius);
    check(cfg.min_turn_radius >= 0.0, "min_turn_radius", "must be non-negative");
    double vehicle_comm_range = 100.0;
    Reader::real_if(doc, "", "vehicle_comm_range", vehicle_comm_range);
    check(vehicle_comm_range > 0.0, "vehicle_comm_range", "must be positive");

    cfg.tracker = detail::tracker_settings(doc);
    cfg.tracker.motion.dt = cfg.dt;
    const SensorModel defaults = detail::sensor_defaults(doc);

    const auto& vehicles = Reader::require(doc, "", "vehicles");
    check(vehicles.is_array(), "vehicles", "expected an array");
    std::set<VehicleId> vehicle_ids;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const std::string p = "vehicles[" + std::to_string(i) + "]";
        const auto& jv = vehicles[i];
        VehicleSpec v;
        const auto id = Reader::integer(Reader::require(jv, p, "id"), p + ".id");
        check(id >= 1, p + ".id", "must be at least 1");
        v.id = static_cast<VehicleId>(id);
        check(vehicle_ids.insert(v.id).second, p + ".id", "duplicate vehicle id");
        v.birth = Reader::integer(Reader::require(jv, p, "birth"), p + ".birth");
        v.death = Reader::integer(Reader::require(jv, p, "death"), p + ".death");
        check(v.birth >= 1, p + ".birth", "must be at least 1");
        check(v.birth < v.death, p + ".death", "must be greater than birth");
        check(v.death <= cfg.scans, p + ".death", "exceeds the scenario horizon");
        if (const auto* l = Reader::optional(jv, "loop")) {
            check(l->is_boolean(), p + ".loop", "expected a boolean");
            v.loop = l->get<bool>();
        }
        Reader::real_if(jv, p, "turn_radius", v.turn_radius);
        check(v.turn_radius > 0.0, p + ".turn_radius", "must be positive");
        Reader::real_if(jv, p, "start_offset", v.start_offset);
        check(v.start_offset >= 0.0, p + ".start_offset", "must be non-negative");

        const auto& wps = Reader::require(jv, p, "waypoints");
        check(wps.is_array() && wps.size() >= 2, p + ".waypoints", "expected at least two waypoints");
        for (std::size_t w = 0; w < wps.size(); ++w) {
            const std::string wp = p + ".waypoints[" + std::to_string(w) + "]";
            check(wps[w].is_array() && wps[w].size() == 3, wp, "expected [x, y, speed]");
            Waypoint point{Reader::real(wps[w][0], wp + "[0]"), Reader::real(wps[w][1], wp + "[1]"),
                           Reader::real(wps[w][2], wp + "[2]")};
            check(cfg.area.contains(point.x, point.y), wp, "waypoint outside the scenario area");
            check(point.speed >= 0.0, wp + "[2]", "speed must be non-negative");
            v.waypoints.push_back(point);
        }
        cfg.vehicles.push_back(std::move(v));
    }

    const auto& sensors = Reader::require(doc, "", "sensors");
    check(sensors.is_array(), "sensors", "expected an array");
    std::set<NodeId> nodes;
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string p = "sensors[" + std::to_string(i) + "]";
        const auto& js = sensors[i];
        SensorSpec s;
        s.model = defaults;
        const auto node = Reader::integer(Reader::require(js, p, "node"), p + ".node");
        check(node >= 1, p + ".node", "must be at least 1");
        s.model.node = static_cast<NodeId>(node);
        check(nodes.insert(s.model.node).second, p + ".node", "duplicate node id");
        s.model.range = Reader::real(Reader::require(js, p, "range"), p + ".range");
        check(s.model.range > 0.0, p + ".range", "must be positive");
        Reader::real_if(js, p, "detection_prob", s.model.detection_prob);
        Reader::real_if(js, p, "clutter_rate", s.model.clutter_rate);
        Reader::real_if(js, p, "meas_noise_std", s.model.meas_noise_std);
        check(s.model.detection_prob >= 0.0 && s.model.detection_prob <= 1.0, p + ".detection_prob", "must lie in [0,1]");
        check(s.model.clutter_rate >= 0.0, p + ".clutter_rate", "must be non-negative");
        check(s.model.meas_noise_std > 0.0, p + ".meas_noise_std", "must be positive");

        const auto* host = Reader::optional(js, "host");
        const auto* pos = Reader::optional(js, "position");
        check((host != nullptr) != (pos != nullptr), p, "exactly one of host or position is required");
        if (host) {
            const auto h = Reader::integer(*host, p + ".host");
            check(h >= 1 && vehicle_ids.contains(static_cast<VehicleId>(h)), p + ".host", "unknown vehicle");
            s.model.mount = HostMount{static_cast<VehicleId>(h)};
            s.comm_range = vehicle_comm_range;
        } else {
            s.model.mount = FixedMount{Reader::point(*pos, p + ".position")};
            s.comm_range = s.model.range;
        }
        Reader::real_if(js, p, "comm_range", s.comm_range);
        if (const auto* m = Reader::optional(js, "birth_rim_points")) {
            const auto v = Reader::integer(*m, p + ".birth_rim_points");
            check(v >= 1, p + ".birth_rim_points", "must be at least 1");
            s.birth_rim_points = static_cast<std::uint32_t>(v);
        }
        check(s.comm_range > 0.0, p + ".comm_range", "must be positive");
        cfg.sensors.push_back(std::move(s));
    }
    return cfg;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text(path)); }

} // namespace cofuse::scenario
