#pragma once

// Scenario files: YAML, SI units throughout. Angles are radians unless the
// key carries a `_deg` suffix. Unknown keys are errors; omitted optional
// keys take the defaults below and are listed in `applied_defaults`.
//
//   name: radial_boost
//   seed: 7
//   simulation: {rate: 100}                      # Hz
//   orbit: {mu, radius, earth_radius, j2}        # m^3/s^2, m, m, -
//   body: {side, inertia, drag_coefficient, reflectivity,
//          specific_impulse, dry_mass}           # m, kg m^2 (diag), -, -, s, kg
//   initial_state: {position, velocity,          # m, m/s (LVLH)
//                   attitude | euler | euler_deg, # [w,x,y,z] or 3-2-1 roll/pitch/yaw
//                   rate, mass}                  # rad/s (body), kg
//   disturbances: {air_density, solar_constant, light_speed, solar_area,
//                  sun_direction, pressure_offset, j2_mode: random|formula,
//                  j2_bound, j2_resample_period, inclination | inclination_deg,
//                  torque_bias, enable: {drag, j2, solar_force, solar_torque,
//                  gravity_gradient, bias_torque}}
//   sensor: {range, period, noise_bound}         # m, s, m
//   guidance: {attractive_gain, repulsive_gain, influence_distance,
//              thrust_reduction, available_thrust}
//   controller: {type: simplex|componentwise, sliding_gain, reaching_threshold,
//                simplex: {directions, max_thrust, weights, thrusters_per_pair},
//                componentwise: {thrust, per_direction},
//                attitude: {k1, k2, torque_limit, attitude_gain}}
//   actuation: {layout: simplex-8|componentwise-12,
//               errors: {enabled, max_reduction, misalignment | misalignment_deg}}
//   obstacles:                                   # times relative to phase start
//     - {name, position, velocity, radius, waypoints: [{time, position}]}
//   phases:
//     - {name, goal, guidance_rate, control_rate, max_speed, lateral_weight,
//        termination: {kind: reach_point|vbar_distance, point, tolerance},
//        cone: {half_angle | half_angle_deg, apex}, obstacles: [names], timeout}
//   outputs: {telemetry, summary}                # file names inside --out-dir

#include "rvsim/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace rvsim {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedObstacle {
    std::string name;
    Obstacle obstacle;

    bool operator==(const NamedObstacle&) const = default;
};

struct PhaseEntry {
    PhaseSpec spec;                       // spec.obstacles is filled by resolve()
    std::vector<std::string> obstacle_names;

    bool operator==(const PhaseEntry&) const = default;
};

struct OutputPaths {
    std::string telemetry = "telemetry.csv";
    std::string summary = "summary.txt";

    bool operator==(const OutputPaths&) const = default;
};

struct ScenarioFile {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    ModelConfig models;
    SpacecraftState initial;
    std::vector<NamedObstacle> obstacles;
    std::vector<PhaseEntry> phases;
    OutputPaths outputs;
    std::vector<std::string> applied_defaults;  // "key = value", in parse order

    /// Phase specs with obstacle names replaced by the obstacle definitions.
    [[nodiscard]] std::vector<PhaseSpec> resolve() const {
        std::vector<PhaseSpec> out;
        for (const PhaseEntry& p : phases) {
            PhaseSpec s = p.spec;
            s.obstacles.clear();
            for (const std::string& n : p.obstacle_names) {
                for (const NamedObstacle& o : obstacles) {
                    if (o.name == n) s.obstacles.push_back(o.obstacle);
                }
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    /// Equality of the effective configuration; the defaults log is ignored.
    bool operator==(const ScenarioFile& o) const {
        const auto same_state = [](const SpacecraftState& a, const SpacecraftState& b) {
            return a.position == b.position && a.velocity == b.velocity &&
                   a.attitude.coeffs() == b.attitude.coeffs() && a.rate == b.rate && a.mass == b.mass;
        };
        return name == o.name && seed == o.seed && models == o.models && same_state(initial, o.initial) &&
               obstacles == o.obstacles && phases == o.phases && outputs == o.outputs;
    }
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string format_value(double v) { return format_double(v); }
inline std::string format_value(bool v) { return v ? "true" : "false"; }
inline std::string format_value(const std::string& v) { return v; }
inline std::string format_value(std::uint64_t v) { return std::to_string(v); }
inline std::string format_value(int v) { return std::to_string(v); }
inline std::string format_value(const Vec3& v) {
    return "[" + format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z()) + "]";
}

class Context {
public:
    explicit Context(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Mark& mark, const std::string& field, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
        os << ": " << field << ": " << msg;
        throw ScenarioError(os.str());
    }

    void note_default(const std::string& field, const std::string& value) {
        defaults.push_back(field + " = " + value);
    }

    std::vector<std::string> defaults;

private:
    std::string source_;
};

inline double to_double(const YAML::Node& n, const std::string& field, const Context& ctx) {
    if (!n.IsScalar()) ctx.fail(n.Mark(), field, "expected a number");
    const std::string& s = n.Scalar();
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    const auto r = std::from_chars(first, s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        ctx.fail(n.Mark(), field, "expected a number, got '" + s + "'");
    if (!std::isfinite(v)) ctx.fail(n.Mark(), field, "value must be finite");
    return v;
}

inline std::uint64_t to_uint64(const YAML::Node& n, const std::string& field, const Context& ctx) {
    if (!n.IsScalar()) ctx.fail(n.Mark(), field, "expected a nonnegative integer");
    const std::string& s = n.Scalar();
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        ctx.fail(n.Mark(), field, "expected a nonnegative integer, got '" + s + "'");
    return v;
}

inline int to_int(const YAML::Node& n, const std::string& field, const Context& ctx) {
    const std::uint64_t v = to_uint64(n, field, ctx);
    if (v > 1000000) ctx.fail(n.Mark(), field, "value out of range");
    return static_cast<int>(v);
}

inline bool to_bool(const YAML::Node& n, const std::string& field, const Context& ctx) {
    if (!n.IsScalar()) ctx.fail(n.Mark(), field, "expected true or false");
    const std::string& s = n.Scalar();
    if (s == "true") return true;
    if (s == "false") return false;
    ctx.fail(n.Mark(), field, "expected true or false, got '" + s + "'");
}

inline std::string to_string(const YAML::Node& n, const std::string& field, const Context& ctx) {
    if (!n.IsScalar()) ctx.fail(n.Mark(), field, "expected a string");
    return n.Scalar();
}

inline Vec3 to_vec3(const YAML::Node& n, const std::string& field, const Context& ctx) {
    if (!n.IsSequence() || n.size() != 3) ctx.fail(n.Mark(), field, "expected a list of 3 numbers");
    Vec3 v;
    for (std::size_t i = 0; i < 3; ++i) v(static_cast<Eigen::Index>(i)) = to_double(n[i], field, ctx);
    return v;
}

template <class T>
T convert(const YAML::Node& n, const std::string& field, const Context& ctx);
template <>
inline double convert<double>(const YAML::Node& n, const std::string& f, const Context& c) { return to_double(n, f, c); }
template <>
inline std::uint64_t convert<std::uint64_t>(const YAML::Node& n, const std::string& f, const Context& c) {
    return to_uint64(n, f, c);
}
template <>
inline int convert<int>(const YAML::Node& n, const std::string& f, const Context& c) { return to_int(n, f, c); }
template <>
inline bool convert<bool>(const YAML::Node& n, const std::string& f, const Context& c) { return to_bool(n, f, c); }
template <>
inline std::string convert<std::string>(const YAML::Node& n, const std::string& f, const Context& c) {
    return to_string(n, f, c);
}
template <>
inline Vec3 convert<Vec3>(const YAML::Node& n, const std::string& f, const Context& c) { return to_vec3(n, f, c); }

/// Reads one mapping, remembering which keys were consumed so that leftovers
/// can be reported as unknown.
class MapReader {
public:
    MapReader(const YAML::Node& node, std::string path, Context& ctx)
        : node_(node), path_(std::move(path)), ctx_(ctx) {
        if (!node_.IsMap()) ctx_.fail(node_.Mark(), path_.empty() ? "<root>" : path_, "expected a mapping");
        for (const auto& kv : node_) {
            const std::string key = kv.first.Scalar();
            if (!keys_.insert(key).second) ctx_.fail(kv.first.Mark(), field(key), "duplicate key");
        }
    }

    [[nodiscard]] std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return keys_.count(key) != 0; }

    YAML::Node child(const std::string& key) {
        used_.insert(key);
        return node_[key];
    }

    template <class T>
    T required(const std::string& key) {
        if (!has(key)) ctx_.fail(node_.Mark(), field(key), "required key is missing");
        return convert<T>(child(key), field(key), ctx_);
    }

    template <class T>
    T optional(const std::string& key, const T& def) {
        if (!has(key)) {
            ctx_.note_default(field(key), format_value(def));
            return def;
        }
        return convert<T>(child(key), field(key), ctx_);
    }

    /// Angle given as `key` (rad) or `key_deg`; at most one may appear.
    double angle(const std::string& key, double def_rad) {
        const std::string deg = key + "_deg";
        if (has(key) && has(deg)) ctx_.fail(node_[deg].Mark(), field(deg), "give either " + key + " or " + deg);
        if (has(deg)) return convert<double>(child(deg), field(deg), ctx_) * std::numbers::pi / 180.0;
        return optional<double>(key, def_rad);
    }

    /// Optional sub-mapping; an absent block yields an empty node.
    YAML::Node block(const std::string& key) {
        if (!has(key)) return YAML::Node(YAML::NodeType::Map);
        return child(key);
    }

    void finish() const {
        for (const auto& kv : node_) {
            const std::string key = kv.first.Scalar();
            if (!used_.count(key)) ctx_.fail(kv.first.Mark(), field(key), "unknown key");
        }
    }

    [[nodiscard]] YAML::Mark mark() const { return node_.Mark(); }
    Context& ctx() { return ctx_; }

private:
    YAML::Node node_;
    std::string path_;
    Context& ctx_;
    std::set<std::string> keys_;
    std::set<std::string> used_;
};

inline void require(bool ok, const MapReader& r, const std::string& key, const std::string& msg, const Context& ctx) {
    if (!ok) ctx.fail(r.mark(), r.field(key), msg);
}

inline void parse_orbit(MapReader r, OrbitParams& o) {
    const OrbitParams d;
    o.mu = r.optional("mu", d.mu);
    o.radius = r.optional("radius", d.radius);
    o.earth_radius = r.optional("earth_radius", d.earth_radius);
    o.j2 = r.optional("j2", d.j2);
    r.finish();
    require(o.mu > 0.0, r, "mu", "must be positive", r.ctx());
    require(o.radius > 0.0, r, "radius", "must be positive", r.ctx());
    require(o.earth_radius > 0.0 && o.earth_radius < o.radius, r, "earth_radius", "must be in (0, radius)", r.ctx());
}

inline void parse_body(MapReader r, BodyProperties& b) {
    const BodyProperties d;
    b.side = r.optional("side", d.side);
    b.inertia = r.optional("inertia", d.inertia);
    b.drag_coefficient = r.optional("drag_coefficient", d.drag_coefficient);
    b.reflectivity = r.optional("reflectivity", d.reflectivity);
    b.specific_impulse = r.optional("specific_impulse", d.specific_impulse);
    b.dry_mass = r.optional("dry_mass", d.dry_mass);
    r.finish();
    require(b.side > 0.0, r, "side", "must be positive", r.ctx());
    require(b.inertia.minCoeff() > 0.0, r, "inertia", "entries must be positive", r.ctx());
    require(b.drag_coefficient >= 0.0, r, "drag_coefficient", "must be nonnegative", r.ctx());
    require(b.reflectivity >= 0.0, r, "reflectivity", "must be nonnegative", r.ctx());
    require(b.specific_impulse > 0.0, r, "specific_impulse", "must be positive", r.ctx());
    require(b.dry_mass > 0.0, r, "dry_mass", "must be positive", r.ctx());
}

inline void parse_initial(MapReader r, SpacecraftState& s, double dry_mass) {
    const SpacecraftState d;
    s.position = r.required<Vec3>("position");
    s.velocity = r.optional("velocity", d.velocity);
    const int given = int(r.has("attitude")) + int(r.has("euler")) + int(r.has("euler_deg"));
    if (given > 1) r.ctx().fail(r.mark(), r.field("attitude"), "give only one of attitude, euler, euler_deg");
    if (r.has("attitude")) {
        const YAML::Node n = r.child("attitude");
        const std::string f = r.field("attitude");
        if (!n.IsSequence() || n.size() != 4) r.ctx().fail(n.Mark(), f, "expected [w, x, y, z]");
        s.attitude = Quaternion(to_double(n[0], f, r.ctx()), to_double(n[1], f, r.ctx()), to_double(n[2], f, r.ctx()),
                                to_double(n[3], f, r.ctx()));
        if (std::abs(s.attitude.norm() - 1.0) > 1e-9) r.ctx().fail(n.Mark(), f, "quaternion must have unit norm");
    } else if (r.has("euler") || r.has("euler_deg")) {
        const bool deg = r.has("euler_deg");
        const std::string key = deg ? "euler_deg" : "euler";
        Vec3 e = to_vec3(r.child(key), r.field(key), r.ctx());
        if (deg) e *= std::numbers::pi / 180.0;
        s.attitude = euler_to_quat({e.x(), e.y(), e.z()});
    } else {
        r.ctx().note_default(r.field("attitude"), "[1, 0, 0, 0]");
    }
    s.rate = r.optional("rate", d.rate);
    s.mass = r.optional("mass", d.mass);
    r.finish();
    require(s.mass > dry_mass, r, "mass", "must exceed body.dry_mass", r.ctx());
}

inline void parse_disturbances(MapReader r, DisturbanceConfig& c) {
    const DisturbanceConfig d;
    c.air_density = r.optional("air_density", d.air_density);
    c.solar_constant = r.optional("solar_constant", d.solar_constant);
    c.light_speed = r.optional("light_speed", d.light_speed);
    c.solar_area = r.optional("solar_area", d.solar_area);
    c.sun_direction = r.optional("sun_direction", d.sun_direction);
    c.pressure_offset = r.optional("pressure_offset", d.pressure_offset);
    const std::string mode = r.optional<std::string>("j2_mode", "random");
    if (mode == "random") {
        c.j2_mode = J2Mode::RandomBounded;
    } else if (mode == "formula") {
        c.j2_mode = J2Mode::Formula;
    } else {
        r.ctx().fail(r.child("j2_mode").Mark(), r.field("j2_mode"), "expected random or formula, got '" + mode + "'");
    }
    c.j2_bound = r.optional("j2_bound", d.j2_bound);
    c.j2_resample_period = r.optional("j2_resample_period", d.j2_resample_period);
    c.inclination = r.angle("inclination", d.inclination);
    c.torque_bias = r.optional("torque_bias", d.torque_bias);
    {
        MapReader e(r.block("enable"), r.field("enable"), r.ctx());
        c.drag = e.optional("drag", d.drag);
        c.j2 = e.optional("j2", d.j2);
        c.solar_force = e.optional("solar_force", d.solar_force);
        c.solar_torque = e.optional("solar_torque", d.solar_torque);
        c.gravity_gradient = e.optional("gravity_gradient", d.gravity_gradient);
        c.bias_torque = e.optional("bias_torque", d.bias_torque);
        e.finish();
    }
    r.finish();
    require(c.air_density >= 0.0, r, "air_density", "must be nonnegative", r.ctx());
    require(c.light_speed > 0.0, r, "light_speed", "must be positive", r.ctx());
    require(std::abs(c.sun_direction.norm() - 1.0) < 1e-9, r, "sun_direction", "must be a unit vector", r.ctx());
    require(c.j2_bound >= 0.0, r, "j2_bound", "must be nonnegative", r.ctx());
    require(c.j2_resample_period > 0.0, r, "j2_resample_period", "must be positive", r.ctx());
}

inline void parse_sensor(MapReader r, SensorConfig& s) {
    const SensorConfig d;
    s.range = r.optional("range", d.range);
    s.period = r.optional("period", d.period);
    s.noise_bound = r.optional("noise_bound", d.noise_bound);
    r.finish();
    require(s.range > 0.0, r, "range", "must be positive", r.ctx());
    require(s.period > 0.0, r, "period", "must be positive", r.ctx());
    require(s.noise_bound >= 0.0, r, "noise_bound", "must be nonnegative", r.ctx());
}

inline void parse_guidance(MapReader r, ApfGains& g, double sensor_range) {
    const ApfGains d;
    g.attractive_gain = r.optional("attractive_gain", d.attractive_gain);
    g.repulsive_gain = r.optional("repulsive_gain", d.repulsive_gain);
    g.influence_distance = r.optional("influence_distance", d.influence_distance);
    g.thrust_reduction = r.optional("thrust_reduction", d.thrust_reduction);
    g.available_thrust = r.optional("available_thrust", d.available_thrust);
    r.finish();
    require(g.attractive_gain > 0.0, r, "attractive_gain", "must be positive", r.ctx());
    require(g.repulsive_gain > 0.0, r, "repulsive_gain", "must be positive", r.ctx());
    require(g.influence_distance > 0.0 && g.influence_distance <= sensor_range, r, "influence_distance",
            "must be in (0, sensor.range]", r.ctx());
    require(g.thrust_reduction > 0.0, r, "thrust_reduction", "must be positive", r.ctx());
    require(g.available_thrust > g.thrust_reduction, r, "available_thrust", "must exceed thrust_reduction",
            r.ctx());
}

inline void parse_controller(MapReader r, ControllerConfig& c) {
    const ControllerConfig d;
    const std::string type = r.optional<std::string>("type", to_string(d.type));
    if (type == "simplex") {
        c.type = ControllerType::Simplex;
    } else if (type == "componentwise") {
        c.type = ControllerType::Componentwise;
    } else {
        r.ctx().fail(r.child("type").Mark(), r.field("type"),
                     "expected simplex or componentwise, got '" + type + "'");
    }
    c.sliding_gain = r.optional("sliding_gain", d.sliding_gain);
    require(c.sliding_gain > 0.0, r, "sliding_gain", "must be positive", r.ctx());
    {
        MapReader s(r.block("simplex"), r.field("simplex"), r.ctx());
        if (s.has("directions")) {
            const YAML::Node n = s.child("directions");
            const std::string f = s.field("directions");
            if (!n.IsSequence() || n.size() != kSimplexSize) r.ctx().fail(n.Mark(), f, "expected 4 direction vectors");
            for (std::size_t i = 0; i < kSimplexSize; ++i) c.simplex.directions[i] = to_vec3(n[i], f, r.ctx());
        } else {
            std::string v = "[";
            for (std::size_t i = 0; i < kSimplexSize; ++i) v += (i ? ", " : "") + format_value(d.simplex.directions[i]);
            r.ctx().note_default(s.field("directions"), v + "]");
        }
        const auto read4 = [&](const std::string& key, std::array<double, kSimplexSize>& out,
                               const std::array<double, kSimplexSize>& def) {
            if (!s.has(key)) {
                std::string v = "[";
                for (std::size_t i = 0; i < kSimplexSize; ++i) v += (i ? ", " : "") + format_double(def[i]);
                r.ctx().note_default(s.field(key), v + "]");
                out = def;
                return;
            }
            const YAML::Node n = s.child(key);
            if (!n.IsSequence() || n.size() != kSimplexSize) r.ctx().fail(n.Mark(), s.field(key), "expected 4 numbers");
            for (std::size_t i = 0; i < kSimplexSize; ++i) out[i] = to_double(n[i], s.field(key), r.ctx());
        };
        read4("max_thrust", c.simplex.max_thrust, d.simplex.max_thrust);
        read4("weights", c.simplex.weights, d.simplex.weights);
        c.simplex.thrusters_per_pair = s.optional("thrusters_per_pair", d.simplex.thrusters_per_pair);
        s.finish();
        try {
            validate_simplex(c.simplex);
        } catch (const InvalidSimplex& e) {
            r.ctx().fail(s.mark(), s.field("directions"), e.what());
        }
        require(c.simplex.thrusters_per_pair > 0, s, "thrusters_per_pair", "must be positive", r.ctx());
    }
    {
        MapReader s(r.block("componentwise"), r.field("componentwise"), r.ctx());
        c.componentwise_thrust = s.optional("thrust", d.componentwise_thrust);
        c.componentwise_per_direction = s.optional("per_direction", d.componentwise_per_direction);
        s.finish();
        require(c.componentwise_thrust > 0.0, s, "thrust", "must be positive", r.ctx());
        require(c.componentwise_per_direction == 2, s, "per_direction",
                "the component-wise bank mounts exactly 2 thrusters per direction", r.ctx());
    }
    {
        MapReader s(r.block("attitude"), r.field("attitude"), r.ctx());
        c.attitude.k1 = s.optional("k1", d.attitude.k1);
        c.attitude.k2 = s.optional("k2", d.attitude.k2);
        c.attitude.torque_limit = s.optional("torque_limit", d.attitude.torque_limit);
        c.attitude.attitude_gain = s.optional("attitude_gain", d.attitude.attitude_gain);
        s.finish();
        require(c.attitude.k1.minCoeff() > 0.0 && c.attitude.k2.minCoeff() > 0.0, s, "k1",
                "super-twisting gains must be positive", r.ctx());
        require(c.attitude.torque_limit > 0.0, s, "torque_limit", "must be positive", r.ctx());
        require(c.attitude.attitude_gain > 0.0, s, "attitude_gain", "must be positive", r.ctx());
    }
    r.finish();
}

inline void parse_actuation(MapReader r, ThrusterErrorModel& e, ControllerType type) {
    const ThrusterErrorModel d;
    const std::string expected = to_string(type == ControllerType::Simplex ? Layout::Simplex8 : Layout::Componentwise12);
    const std::string layout = r.optional<std::string>("layout", expected);
    if (layout != expected) {
        r.ctx().fail(r.child("layout").Mark(), r.field("layout"),
                     "layout '" + layout + "' does not match the " + to_string(type) + " controller (expected " +
                         expected + ")");
    }
    {
        MapReader s(r.block("errors"), r.field("errors"), r.ctx());
        e.enabled = s.optional("enabled", d.enabled);
        e.max_reduction = s.optional("max_reduction", d.max_reduction);
        e.misalignment = s.angle("misalignment", d.misalignment);
        s.finish();
        require(e.max_reduction < 1.0, s, "max_reduction", "must be below 1 (negative selects f/(n T_max))", r.ctx());
        require(e.misalignment >= 0.0 && e.misalignment < std::numbers::pi / 2.0, s, "misalignment",
                "must be in [0, pi/2)", r.ctx());
    }
    r.finish();
}

inline NamedObstacle parse_obstacle(MapReader r) {
    NamedObstacle o;
    o.name = r.required<std::string>("name");
    o.obstacle.position = r.optional("position", Vec3(Vec3::Zero()));
    o.obstacle.velocity = r.optional("velocity", Vec3(Vec3::Zero()));
    o.obstacle.radius = r.required<double>("radius");
    if (r.has("waypoints")) {
        const YAML::Node n = r.child("waypoints");
        if (!n.IsSequence()) r.ctx().fail(n.Mark(), r.field("waypoints"), "expected a list");
        for (std::size_t i = 0; i < n.size(); ++i) {
            MapReader w(n[i], r.field("waypoints") + "[" + std::to_string(i) + "]", r.ctx());
            Waypoint wp;
            wp.time = w.required<double>("time");
            wp.position = w.required<Vec3>("position");
            w.finish();
            if (!o.obstacle.waypoints.empty() && !(wp.time > o.obstacle.waypoints.back().time))
                r.ctx().fail(n[i].Mark(), w.field("time"), "waypoint times must increase");
            o.obstacle.waypoints.push_back(wp);
        }
    }
    r.finish();
    require(o.obstacle.radius > 0.0, r, "radius", "must be positive", r.ctx());
    return o;
}

inline PhaseEntry parse_phase(MapReader r, const ScenarioFile& sc) {
    PhaseEntry p;
    const PhaseSpec d;
    p.spec.name = r.required<std::string>("name");
    p.spec.goal = r.required<Vec3>("goal");
    p.spec.guidance_rate = r.optional("guidance_rate", d.guidance_rate);
    p.spec.control_rate = r.optional("control_rate", d.control_rate);
    p.spec.max_speed = r.optional("max_speed", d.max_speed);
    p.spec.lateral_weight = r.optional("lateral_weight", d.lateral_weight);
    {
        MapReader t(r.block("termination"), r.field("termination"), r.ctx());
        const std::string kind = t.optional<std::string>("kind", "reach_point");
        if (kind == "reach_point") {
            p.spec.termination.kind = TerminationKind::ReachPoint;
        } else if (kind == "vbar_distance") {
            p.spec.termination.kind = TerminationKind::VbarDistance;
        } else {
            r.ctx().fail(t.child("kind").Mark(), t.field("kind"),
                         "expected reach_point or vbar_distance, got '" + kind + "'");
        }
        p.spec.termination.point = t.optional("point", p.spec.goal);
        p.spec.termination.tolerance = t.optional("tolerance", d.termination.tolerance);
        t.finish();
        require(p.spec.termination.tolerance > 0.0, t, "tolerance", "must be positive", r.ctx());
    }
    if (r.has("cone")) {
        MapReader c(r.child("cone"), r.field("cone"), r.ctx());
        ApproachCone cone;
        cone.half_angle = c.angle("half_angle", cone.half_angle);
        cone.apex = c.optional("apex", cone.apex);
        c.finish();
        require(cone.half_angle > 0.0 && cone.half_angle < std::numbers::pi / 2.0, c, "half_angle",
                "must be in (0, 90) degrees", r.ctx());
        p.spec.cone = cone;
    }
    if (r.has("obstacles")) {
        const YAML::Node n = r.child("obstacles");
        if (!n.IsSequence()) r.ctx().fail(n.Mark(), r.field("obstacles"), "expected a list of obstacle names");
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string name = to_string(n[i], r.field("obstacles"), r.ctx());
            bool found = false;
            for (const NamedObstacle& o : sc.obstacles) found = found || o.name == name;
            if (!found) r.ctx().fail(n[i].Mark(), r.field("obstacles"), "unknown obstacle '" + name + "'");
            p.obstacle_names.push_back(name);
        }
    }
    p.spec.timeout = r.optional("timeout", d.timeout);
    r.finish();

    const double sim_rate = sc.models.sim_rate;
    for (const auto& [key, rate] : {std::pair{"guidance_rate", p.spec.guidance_rate},
                                    std::pair{"control_rate", p.spec.control_rate}}) {
        try {
            steps_per_tick(sim_rate, rate, key);
        } catch (const std::invalid_argument& e) {
            r.ctx().fail(r.has(key) ? r.child(key).Mark() : r.mark(), r.field(key), e.what());
        }
    }
    require(p.spec.control_rate >= p.spec.guidance_rate, r, "control_rate", "must be at least guidance_rate",
            r.ctx());
    require(p.spec.max_speed > 0.0, r, "max_speed", "must be positive", r.ctx());
    require(p.spec.lateral_weight > 0.0, r, "lateral_weight", "must be positive", r.ctx());
    require(p.spec.timeout > 0.0, r, "timeout", "must be positive", r.ctx());
    return p;
}

}  // namespace detail

/// Parses and validates scenario text. `source` names the input in diagnostics.
inline ScenarioFile parse_scenario_text(const std::string& text, const std::string& source = "<scenario>") {
    using namespace detail;
    Context ctx(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        ctx.fail(e.mark, "<syntax>", e.msg);
    }
    if (!root || root.IsNull()) ctx.fail(YAML::Mark::null_mark(), "<root>", "empty scenario");

    ScenarioFile sc;
    MapReader r(root, "", ctx);
    sc.name = r.optional<std::string>("name", sc.name);
    sc.seed = r.optional<std::uint64_t>("seed", sc.seed);
    {
        MapReader s(r.block("simulation"), "simulation", ctx);
        sc.models.sim_rate = s.optional("rate", sc.models.sim_rate);
        s.finish();
        require(sc.models.sim_rate > 0.0, s, "rate", "must be positive", ctx);
    }
    parse_orbit(MapReader(r.block("orbit"), "orbit", ctx), sc.models.orbit);
    parse_body(MapReader(r.block("body"), "body", ctx), sc.models.body);
    parse_initial(MapReader(r.block("initial_state"), "initial_state", ctx), sc.initial, sc.models.body.dry_mass);
    parse_disturbances(MapReader(r.block("disturbances"), "disturbances", ctx), sc.models.disturbances);
    {
        MapReader s(r.block("sensor"), "sensor", ctx);
        const YAML::Mark mark = s.mark();
        parse_sensor(std::move(s), sc.models.sensor);
        try {
            steps_per_tick(sc.models.sim_rate, 1.0 / sc.models.sensor.period, "sensor");
        } catch (const std::invalid_argument& e) {
            ctx.fail(mark, "sensor.period", e.what());
        }
    }
    parse_guidance(MapReader(r.block("guidance"), "guidance", ctx), sc.models.guidance, sc.models.sensor.range);
    {
        MapReader c(r.block("controller"), "controller", ctx);
        sc.models.reaching_threshold = c.optional("reaching_threshold", sc.models.reaching_threshold);
        require(sc.models.reaching_threshold > 0.0, c, "reaching_threshold", "must be positive", ctx);
        parse_controller(std::move(c), sc.models.controller);
    }
    parse_actuation(MapReader(r.block("actuation"), "actuation", ctx), sc.models.thruster_errors,
                    sc.models.controller.type);
    if (r.has("obstacles")) {
        const YAML::Node n = r.child("obstacles");
        if (!n.IsSequence()) ctx.fail(n.Mark(), "obstacles", "expected a list");
        for (std::size_t i = 0; i < n.size(); ++i) {
            NamedObstacle o = parse_obstacle(MapReader(n[i], "obstacles[" + std::to_string(i) + "]", ctx));
            for (const NamedObstacle& prev : sc.obstacles) {
                if (prev.name == o.name) ctx.fail(n[i].Mark(), "obstacles[" + std::to_string(i) + "].name",
                                                  "duplicate obstacle name '" + o.name + "'");
            }
            sc.obstacles.push_back(std::move(o));
        }
    }
    if (!r.has("phases")) ctx.fail(root.Mark(), "phases", "required key is missing");
    {
        const YAML::Node n = r.child("phases");
        if (!n.IsSequence() || n.size() == 0) ctx.fail(n.Mark(), "phases", "expected a nonempty list");
        for (std::size_t i = 0; i < n.size(); ++i)
            sc.phases.push_back(parse_phase(MapReader(n[i], "phases[" + std::to_string(i) + "]", ctx), sc));
    }
    {
        MapReader o(r.block("outputs"), "outputs", ctx);
        sc.outputs.telemetry = o.optional("telemetry", sc.outputs.telemetry);
        sc.outputs.summary = o.optional("summary", sc.outputs.summary);
        o.finish();
        require(!sc.outputs.telemetry.empty() && sc.outputs.telemetry != sc.outputs.summary, o, "telemetry",
                "telemetry and summary need distinct nonempty names", ctx);
    }
    r.finish();
    sc.applied_defaults = std::move(ctx.defaults);
    return sc;
}

inline ScenarioFile parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str(), path);
}

namespace detail {

inline void emit(YAML::Emitter& out, const char* key, double v) { out << YAML::Key << key << YAML::Value << format_double(v); }
inline void emit(YAML::Emitter& out, const char* key, bool v) { out << YAML::Key << key << YAML::Value << (v ? "true" : "false"); }
inline void emit(YAML::Emitter& out, const char* key, int v) { out << YAML::Key << key << YAML::Value << std::to_string(v); }
inline void emit(YAML::Emitter& out, const char* key, const std::string& v) {
    out << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << v;
}
inline void emit_seq(YAML::Emitter& out, std::initializer_list<double> vs) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double v : vs) out << format_double(v);
    out << YAML::EndSeq;
}
inline void emit(YAML::Emitter& out, const char* key, const Vec3& v) {
    out << YAML::Key << key << YAML::Value;
    emit_seq(out, {v.x(), v.y(), v.z()});
}

}  // namespace detail

/// Effective configuration as scenario text; every key is written, so
/// parsing the result applies no defaults and reproduces `sc`.
inline std::string write_scenario(const ScenarioFile& sc) {
    using detail::emit;
    const ModelConfig& m = sc.models;
    YAML::Emitter out;
    out << YAML::BeginMap;
    emit(out, "name", sc.name);
    out << YAML::Key << "seed" << YAML::Value << std::to_string(sc.seed);

    out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
    emit(out, "rate", m.sim_rate);
    out << YAML::EndMap;

    out << YAML::Key << "orbit" << YAML::Value << YAML::BeginMap;
    emit(out, "mu", m.orbit.mu);
    emit(out, "radius", m.orbit.radius);
    emit(out, "earth_radius", m.orbit.earth_radius);
    emit(out, "j2", m.orbit.j2);
    out << YAML::EndMap;

    out << YAML::Key << "body" << YAML::Value << YAML::BeginMap;
    emit(out, "side", m.body.side);
    emit(out, "inertia", m.body.inertia);
    emit(out, "drag_coefficient", m.body.drag_coefficient);
    emit(out, "reflectivity", m.body.reflectivity);
    emit(out, "specific_impulse", m.body.specific_impulse);
    emit(out, "dry_mass", m.body.dry_mass);
    out << YAML::EndMap;

    out << YAML::Key << "initial_state" << YAML::Value << YAML::BeginMap;
    emit(out, "position", sc.initial.position);
    emit(out, "velocity", sc.initial.velocity);
    out << YAML::Key << "attitude" << YAML::Value;
    detail::emit_seq(out, {sc.initial.attitude.w(), sc.initial.attitude.x(), sc.initial.attitude.y(),
                           sc.initial.attitude.z()});
    emit(out, "rate", sc.initial.rate);
    emit(out, "mass", sc.initial.mass);
    out << YAML::EndMap;

    const DisturbanceConfig& d = m.disturbances;
    out << YAML::Key << "disturbances" << YAML::Value << YAML::BeginMap;
    emit(out, "air_density", d.air_density);
    emit(out, "solar_constant", d.solar_constant);
    emit(out, "light_speed", d.light_speed);
    emit(out, "solar_area", d.solar_area);
    emit(out, "sun_direction", d.sun_direction);
    emit(out, "pressure_offset", d.pressure_offset);
    emit(out, "j2_mode", std::string(d.j2_mode == J2Mode::Formula ? "formula" : "random"));
    emit(out, "j2_bound", d.j2_bound);
    emit(out, "j2_resample_period", d.j2_resample_period);
    emit(out, "inclination", d.inclination);
    emit(out, "torque_bias", d.torque_bias);
    out << YAML::Key << "enable" << YAML::Value << YAML::BeginMap;
    emit(out, "drag", d.drag);
    emit(out, "j2", d.j2);
    emit(out, "solar_force", d.solar_force);
    emit(out, "solar_torque", d.solar_torque);
    emit(out, "gravity_gradient", d.gravity_gradient);
    emit(out, "bias_torque", d.bias_torque);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "sensor" << YAML::Value << YAML::BeginMap;
    emit(out, "range", m.sensor.range);
    emit(out, "period", m.sensor.period);
    emit(out, "noise_bound", m.sensor.noise_bound);
    out << YAML::EndMap;

    out << YAML::Key << "guidance" << YAML::Value << YAML::BeginMap;
    emit(out, "attractive_gain", m.guidance.attractive_gain);
    emit(out, "repulsive_gain", m.guidance.repulsive_gain);
    emit(out, "influence_distance", m.guidance.influence_distance);
    emit(out, "thrust_reduction", m.guidance.thrust_reduction);
    emit(out, "available_thrust", m.guidance.available_thrust);
    out << YAML::EndMap;

    const ControllerConfig& c = m.controller;
    out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
    emit(out, "type", to_string(c.type));
    emit(out, "sliding_gain", c.sliding_gain);
    emit(out, "reaching_threshold", m.reaching_threshold);
    out << YAML::Key << "simplex" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directions" << YAML::Value << YAML::BeginSeq;
    for (const Vec3& v : c.simplex.directions) detail::emit_seq(out, {v.x(), v.y(), v.z()});
    out << YAML::EndSeq;
    const auto& t = c.simplex.max_thrust;
    const auto& w = c.simplex.weights;
    out << YAML::Key << "max_thrust" << YAML::Value;
    detail::emit_seq(out, {t[0], t[1], t[2], t[3]});
    out << YAML::Key << "weights" << YAML::Value;
    detail::emit_seq(out, {w[0], w[1], w[2], w[3]});
    emit(out, "thrusters_per_pair", c.simplex.thrusters_per_pair);
    out << YAML::EndMap;
    out << YAML::Key << "componentwise" << YAML::Value << YAML::BeginMap;
    emit(out, "thrust", c.componentwise_thrust);
    emit(out, "per_direction", c.componentwise_per_direction);
    out << YAML::EndMap;
    out << YAML::Key << "attitude" << YAML::Value << YAML::BeginMap;
    emit(out, "k1", c.attitude.k1);
    emit(out, "k2", c.attitude.k2);
    emit(out, "torque_limit", c.attitude.torque_limit);
    emit(out, "attitude_gain", c.attitude.attitude_gain);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "actuation" << YAML::Value << YAML::BeginMap;
    emit(out, "layout", to_string(c.type == ControllerType::Simplex ? Layout::Simplex8 : Layout::Componentwise12));
    out << YAML::Key << "errors" << YAML::Value << YAML::BeginMap;
    emit(out, "enabled", m.thruster_errors.enabled);
    emit(out, "max_reduction", m.thruster_errors.max_reduction);
    emit(out, "misalignment", m.thruster_errors.misalignment);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "obstacles" << YAML::Value << YAML::BeginSeq;
    for (const NamedObstacle& o : sc.obstacles) {
        out << YAML::BeginMap;
        emit(out, "name", o.name);
        emit(out, "position", o.obstacle.position);
        emit(out, "velocity", o.obstacle.velocity);
        emit(out, "radius", o.obstacle.radius);
        out << YAML::Key << "waypoints" << YAML::Value << YAML::BeginSeq;
        for (const Waypoint& wp : o.obstacle.waypoints) {
            out << YAML::Flow << YAML::BeginMap;
            emit(out, "time", wp.time);
            emit(out, "position", wp.position);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "phases" << YAML::Value << YAML::BeginSeq;
    for (const PhaseEntry& p : sc.phases) {
        const PhaseSpec& s = p.spec;
        out << YAML::BeginMap;
        emit(out, "name", s.name);
        emit(out, "goal", s.goal);
        emit(out, "guidance_rate", s.guidance_rate);
        emit(out, "control_rate", s.control_rate);
        emit(out, "max_speed", s.max_speed);
        emit(out, "lateral_weight", s.lateral_weight);
        out << YAML::Key << "termination" << YAML::Value << YAML::BeginMap;
        emit(out, "kind", std::string(s.termination.kind == TerminationKind::ReachPoint ? "reach_point" : "vbar_distance"));
        emit(out, "point", s.termination.point);
        emit(out, "tolerance", s.termination.tolerance);
        out << YAML::EndMap;
        if (s.cone) {
            out << YAML::Key << "cone" << YAML::Value << YAML::BeginMap;
            emit(out, "half_angle", s.cone->half_angle);
            emit(out, "apex", s.cone->apex);
            out << YAML::EndMap;
        }
        out << YAML::Key << "obstacles" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const std::string& n : p.obstacle_names) out << YAML::DoubleQuoted << n;
        out << YAML::EndSeq;
        emit(out, "timeout", s.timeout);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    emit(out, "telemetry", sc.outputs.telemetry);
    emit(out, "summary", sc.outputs.summary);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace rvsim
