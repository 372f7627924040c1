#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string_view>
#include <type_traits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cofuse/core/error.hpp"
#include "cofuse/core/lmb.hpp"

namespace cofuse::net {

inline constexpr const char* kMessageSchema = "cofuse.posterior";
inline constexpr const char* kMessageVersion = "v1";

struct MessageComponent {
    Label label;
    double existence = 0.0;
    std::vector<Particle> particles;
};

/// A node's posterior as broadcast to its neighbors during consensus round `consensus_index`.
struct PosteriorMessage {
    NodeId owner = 0;
    Time time = 0;
    std::uint32_t consensus_index = 0;
    std::vector<MessageComponent> components; ///< ordered by label
};

inline PosteriorMessage to_message(const LmbDensity& d, std::uint32_t consensus_index) {
    PosteriorMessage msg{d.owner(), d.time(), consensus_index, {}};
    msg.components.reserve(d.size());
    for (const auto& c : d.components()) {
        MessageComponent mc{c.label, c.existence, {}};
        if (c.density) mc.particles.assign(c.density->particles().begin(), c.density->particles().end());
        msg.components.push_back(std::move(mc));
    }
    return msg;
}

inline LmbDensity to_density(const PosteriorMessage& msg) {
    std::vector<BernoulliComponent> cs;
    cs.reserve(msg.components.size());
    for (const auto& mc : msg.components) {
        cs.push_back({mc.label, mc.existence, share(ParticleSet{mc.particles})});
    }
    return LmbDensity{msg.time, msg.owner, std::move(cs)};
}

enum class Encoding {
    Json, ///< compact UTF-8 text
    Cbor, ///< framed binary (RFC 8949), same document structure
};

namespace detail {

using nlohmann::json;

inline json to_json(const PosteriorMessage& msg) {
    json comps = json::array();
    for (const auto& mc : msg.components) {
        json parts = json::array();
        for (const auto& p : mc.particles) {
            parts.push_back({p.weight, p.state.px, p.state.py, p.state.vx, p.state.vy, p.state.omega});
        }
        comps.push_back({{"label", {mc.label.birth_time, mc.label.origin_node, mc.label.birth_index}},
                         {"existence", mc.existence},
                         {"particles", std::move(parts)}});
    }
    return {{"schema", kMessageSchema},
            {"version", kMessageVersion},
            {"owner", msg.owner},
            {"time", msg.time},
            {"consensus_index", msg.consensus_index},
            {"components", std::move(comps)}};
}

inline const json& field(const json& obj, const char* name, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(path.empty() ? name : path + "." + name, "missing field");
    return *it;
}

template <typename T>
T number(const json& v, const std::string& path) {
    if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ParseError(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ParseError(path, "expected a finite number");
        return x;
    } else {
        if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) return v.get<T>();
            if (v.get<std::int64_t>() < 0) throw ParseError(path, "expected a non-negative integer");
        }
        return v.get<T>();
    }
}

inline PosteriorMessage from_json(const json& doc) {
    const auto& schema = field(doc, "schema", "");
    if (!schema.is_string() || schema.get<std::string>() != kMessageSchema) throw ParseError("schema", "unknown schema");
    const auto& version = field(doc, "version", "");
    if (!version.is_string() || version.get<std::string>() != kMessageVersion)
        throw ParseError("version", "unsupported schema version");

    PosteriorMessage msg;
    msg.owner = number<NodeId>(field(doc, "owner", ""), "owner");
    msg.time = number<Time>(field(doc, "time", ""), "time");
    msg.consensus_index = number<std::uint32_t>(field(doc, "consensus_index", ""), "consensus_index");

    const auto& comps = field(doc, "components", "");
    if (!comps.is_array()) throw ParseError("components", "expected an array");
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const std::string base = "components[" + std::to_string(c) + "]";
        const auto& jc = comps[c];
        MessageComponent mc;

        const auto& lab = field(jc, "label", base);
        if (!lab.is_array() || lab.size() != 3) throw ParseError(base + ".label", "expected [birth_time, origin_node, birth_index]");
        mc.label = Label{number<Time>(lab[0], base + ".label[0]"), number<NodeId>(lab[1], base + ".label[1]"),
                         number<std::uint32_t>(lab[2], base + ".label[2]")};

        mc.existence = number<double>(field(jc, "existence", base), base + ".existence");
        if (mc.existence < 0.0 || mc.existence > 1.0) throw ParseError(base + ".existence", "outside [0,1]");

        const auto& parts = field(jc, "particles", base);
        if (!parts.is_array()) throw ParseError(base + ".particles", "expected an array");
        double total = 0.0;
        mc.particles.reserve(parts.size());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const std::string pp = base + ".particles[" + std::to_string(p) + "]";
            const auto& jp = parts[p];
            if (!jp.is_array() || jp.size() != 6) throw ParseError(pp, "expected [weight, px, py, vx, vy, omega]");
            Particle part;
            part.weight = number<double>(jp[0], pp + "[0]");
            if (part.weight < 0.0) throw ParseError(pp + "[0]", "negative weight");
            part.state = KinematicState{number<double>(jp[1], pp + "[1]"), number<double>(jp[2], pp + "[2]"),
                                        number<double>(jp[3], pp + "[3]"), number<double>(jp[4], pp + "[4]"),
                                        number<double>(jp[5], pp + "[5]")};
            total += part.weight;
            mc.particles.push_back(part);
        }
        if (!mc.particles.empty() && std::abs(total - 1.0) > 1e-6)
            throw ParseError(base + ".particles", "weights are not normalized");
        if (mc.particles.empty() && mc.existence > 0.0)
            throw ParseError(base + ".particles", "component with positive existence has no particles");
        if (!msg.components.empty() && !(msg.components.back().label < mc.label))
            throw ParseError(base + ".label", "components must be strictly ordered by label");
        msg.components.push_back(std::move(mc));
    }
    return msg;
}

} // namespace detail

/// Deterministic encoding: component order follows labels and object keys are sorted.
inline std::string serialize(const PosteriorMessage& msg, Encoding enc = Encoding::Json) {
    const auto doc = detail::to_json(msg);
    if (enc == Encoding::Json) return doc.dump();
    const auto bytes = nlohmann::json::to_cbor(doc);
    return {bytes.begin(), bytes.end()};
}

inline PosteriorMessage deserialize(std::string_view bytes, Encoding enc = Encoding::Json) {
    nlohmann::json doc;
    try {
        doc = enc == Encoding::Json ? nlohmann::json::parse(bytes) : nlohmann::json::from_cbor(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("", std::string("malformed message: ") + e.what());
    }
    return detail::from_json(doc);
}

/// Writes `<dir>/node_<owner>/scan_<time>_round_<consensus_index>.json`.
inline std::filesystem::path dump_message(const std::filesystem::path& dir, const PosteriorMessage& msg) {
    const auto node_dir = dir / ("node_" + std::to_string(msg.owner));
    std::filesystem::create_directories(node_dir);
    const auto path =
        node_dir / ("scan_" + std::to_string(msg.time) + "_round_" + std::to_string(msg.consensus_index) + ".json");
    std::ofstream f(path, std::ios::binary);
    f << serialize(msg);
    return path;
}

inline bool operator==(const MessageComponent& a, const MessageComponent& b) {
    if (a.label != b.label || a.existence != b.existence || a.particles.size() != b.particles.size()) return false;
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        if (a.particles[i].weight != b.particles[i].weight || !(a.particles[i].state == b.particles[i].state)) return false;
    }
    return true;
}

inline bool operator==(const PosteriorMessage& a, const PosteriorMessage& b) {
    return a.owner == b.owner && a.time == b.time && a.consensus_index == b.consensus_index &&
           a.components == b.components;
}

} // namespace cofuse::net
