#pragma once

// Closed-loop phase runner. Dynamics advance at the simulation rate; the
// LIDAR, the APF guidance and the position/attitude controllers run at their
// own rates with zero-order hold in between. Phases are chained through a
// Simulation object that owns every per-run random stream.

#include "rvsim/actuation.hpp"
#include "rvsim/control.hpp"
#include "rvsim/disturbances.hpp"
#include "rvsim/dynamics.hpp"
#include "rvsim/frames.hpp"
#include "rvsim/guidance.hpp"
#include "rvsim/sensors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvsim {

enum class ControllerType { Simplex, Componentwise };

inline std::string to_string(ControllerType c) {
    return c == ControllerType::Simplex ? "simplex" : "componentwise";
}

struct ControllerConfig {
    ControllerType type = ControllerType::Simplex;
    double sliding_gain = 1.0;               // c_x
    SimplexConfig simplex;
    double componentwise_thrust = 1.0;       // T_max per thruster, N
    int componentwise_per_direction = 2;     // n
    StwGains attitude;

    bool operator==(const ControllerConfig&) const = default;
};

/// Everything except the phase list: physical models and controller setup.
struct ModelConfig {
    double sim_rate = 100.0;  // Hz
    OrbitParams orbit;
    BodyProperties body;
    DisturbanceConfig disturbances;
    SensorConfig sensor;
    ApfGains guidance;
    ControllerConfig controller;
    ThrusterErrorModel thruster_errors;
    /// The sliding regime counts as reached once |sigma|_inf drops below this
    /// value within a guidance interval; the residual is tracked from then on.
    double reaching_threshold = 5e-4;

    bool operator==(const ModelConfig&) const = default;
};

enum class TerminationKind { ReachPoint, VbarDistance };

struct Termination {
    TerminationKind kind = TerminationKind::ReachPoint;
    Vec3 point = Vec3::Zero();
    double tolerance = 5.0;  // m

    [[nodiscard]] bool satisfied(const Vec3& x) const {
        if (kind == TerminationKind::ReachPoint) return (x - point).norm() <= tolerance;
        return std::abs(x.x() - point.x()) <= tolerance;
    }

    bool operator==(const Termination&) const = default;
};

struct ApproachCone {
    double half_angle = 10.0 * std::numbers::pi / 180.0;  // rad
    Vec3 apex = Vec3::Zero();

    bool operator==(const ApproachCone&) const = default;
};

struct PhaseSpec {
    std::string name = "phase";
    Vec3 goal = Vec3::Zero();
    double guidance_rate = 1.0;  // Hz
    double control_rate = 10.0;  // Hz
    double max_speed = 0.4;      // m/s
    double lateral_weight = 1.0; // see ApfGains::lateral_weight
    Termination termination;
    std::optional<ApproachCone> cone;
    std::vector<Obstacle> obstacles;
    double timeout = 15000.0;    // s

    bool operator==(const PhaseSpec&) const = default;
};

enum class PhaseStatus { Completed, Timeout, PropellantOut, Collision };

inline std::string to_string(PhaseStatus s) {
    switch (s) {
        case PhaseStatus::Completed: return "completed";
        case PhaseStatus::Timeout: return "timeout";
        case PhaseStatus::PropellantOut: return "propellant-out";
        case PhaseStatus::Collision: return "collision";
    }
    return "unknown";
}

struct PhaseResult {
    std::string name;
    PhaseStatus status = PhaseStatus::Completed;
    double fuel = 0.0;            // kg
    double elapsed = 0.0;         // s
    double control_effort = 0.0;  // N s
    Vec3 final_position = Vec3::Zero();
    Vec3 final_error = Vec3::Zero();  // final position - goal
    double min_clearance = std::numeric_limits<double>::infinity();  // m, surface distance
    bool cone_breach = false;
    bool collision = false;
    bool propellant_out = false;
    double max_sliding_residual = 0.0;  // max |sigma|_inf after reaching, per guidance interval
    double reached_fraction = 0.0;      // guidance intervals in which sigma entered the band
    std::int64_t steps = 0;
    std::int64_t sensor_ticks = 0;
    std::int64_t guidance_ticks = 0;
    std::int64_t control_ticks = 0;
    std::int64_t thruster_switches = 0;  // control ticks where the firing word changed
};

struct TelemetryRow {
    double t = 0.0;
    SpacecraftState state;
    Vec3 sigma = Vec3::Zero();
    Vec3 force_body = Vec3::Zero();
    std::uint16_t word = 0;
    int phase = 0;
    double min_obstacle_distance = std::numeric_limits<double>::quiet_NaN();
    double cone_margin = std::numeric_limits<double>::quiet_NaN();
};

using TelemetrySink = std::function<void(const TelemetryRow&)>;

/// CE = sum |F_k| dt over the sampled history.
inline double control_effort(std::span<const double> thrust_magnitudes, double dt) {
    double ce = 0.0;
    for (double f : thrust_magnitudes) ce += std::abs(f) * dt;
    return ce;
}

/// CE with |F| = |Fx| + |Fy| + |Fz|.
inline double control_effort(std::span<const Vec3> thrust_history, double dt) {
    double ce = 0.0;
    for (const Vec3& f : thrust_history) ce += f.lpNorm<1>() * dt;
    return ce;
}

/// Signed cone margin tan(half) * axial - lateral [m], axial measured along
/// V-bar from the apex. Nonnegative inside the cone.
inline double cone_margin(const Vec3& x, const ApproachCone& cone) {
    const Vec3 rel = x - cone.apex;
    const double axial = std::abs(rel.x());
    const double lateral = std::hypot(rel.y(), rel.z());
    return std::tan(cone.half_angle) * axial - lateral;
}

inline bool cone_check(const Vec3& x, double half_angle, const Vec3& apex) {
    if (!(half_angle > 0.0 && half_angle < std::numbers::pi / 2.0))
        throw std::invalid_argument("cone_check: half-angle must be in (0, pi/2)");
    return cone_margin(x, ApproachCone{half_angle, apex}) >= 0.0;
}

/// Number of simulation steps per update of a component running at `rate`;
/// throws unless the rate divides the simulation rate.
inline std::int64_t steps_per_tick(double sim_rate, double rate, const std::string& what) {
    if (!(rate > 0.0)) throw std::invalid_argument(what + " rate must be positive");
    const double ratio = sim_rate / rate;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw std::invalid_argument(what + " rate " + std::to_string(rate) +
                                    " Hz does not divide the simulation rate " +
                                    std::to_string(sim_rate) + " Hz");
    }
    return static_cast<std::int64_t>(rounded);
}

/// One closed-loop run. Owns the thruster error draw, the disturbance stream
/// and the controller memories; phases run back to back on the same object.
class Simulation {
public:
    Simulation(ModelConfig models, std::uint64_t seed)
        : models_(std::move(models)),
          seed_(seed),
          bank_(make_bank(models_, seed)),
          disturbances_(models_.disturbances, derive_seed(seed, 1)) {
        validate_simplex(models_.controller.simplex);
    }

    [[nodiscard]] const ModelConfig& models() const { return models_; }
    [[nodiscard]] const ThrusterBank& bank() const { return bank_; }
    [[nodiscard]] double mission_time() const { return mission_time_; }

    PhaseResult run_phase(SpacecraftState& state, const PhaseSpec& spec, int phase_index = 0,
                          const TelemetrySink& sink = {}) {
        const double dt = 1.0 / models_.sim_rate;
        const std::int64_t sensor_steps = steps_per_tick(models_.sim_rate, 1.0 / models_.sensor.period, "sensor");
        const std::int64_t guidance_steps = steps_per_tick(models_.sim_rate, spec.guidance_rate, "guidance");
        const std::int64_t control_steps = steps_per_tick(models_.sim_rate, spec.control_rate, "control");
        if (control_steps > guidance_steps)
            throw std::invalid_argument("control rate must be at least the guidance rate");

        const ControllerConfig& cc = models_.controller;
        const double keep_out = models_.body.half_diagonal();
        const double band = models_.reaching_threshold;
        LidarSensor sensor(models_.sensor, spec.obstacles.size(),
                           derive_seed(seed_, 100 + static_cast<std::uint64_t>(phase_index)));
        ApfGains gains = models_.guidance;
        gains.max_speed = spec.max_speed;
        gains.lateral_weight = spec.lateral_weight;
        ApfGuidance guidance(gains);

        PhaseResult res;
        res.name = spec.name;
        const double m0 = state.mass;
        Vec3 v_des = Vec3::Zero();
        FiringResult firing;
        Vec3 wheel = Vec3::Zero();
        std::uint16_t last_word = 0;
        bool reached_in_interval = false;
        std::int64_t intervals_reached = 0;

        auto clearance = [&](const Vec3& x, double t) {
            double c = std::numeric_limits<double>::infinity();
            for (const Obstacle& o : spec.obstacles) c = std::min(c, (o.position_at(t) - x).norm() - o.radius);
            return c;
        };
        res.min_clearance = clearance(state.position, 0.0);

        std::int64_t k = 0;
        for (;; ++k) {
            const double t = static_cast<double>(k) * dt;
            if (spec.termination.satisfied(state.position)) {
                res.status = PhaseStatus::Completed;
                break;
            }
            if (t >= spec.timeout) {
                res.status = PhaseStatus::Timeout;
                break;
            }

            if (k % sensor_steps == 0) {
                sensor.sample(t, state.position, spec.obstacles);
                ++res.sensor_ticks;
            }
            if (k % guidance_steps == 0) {
                if (reached_in_interval) ++intervals_reached;
                reached_in_interval = false;
                const GuidanceCommand cmd = guidance.update(state.position, state.velocity, state.mass,
                                                            spec.goal, sensor.tracks(), models_.sensor.range);
                v_des = cmd.desired_velocity;
                ++res.guidance_ticks;
            }
            const Vec3 sigma = sliding_output(state.velocity, v_des, cc.sliding_gain);
            if (k % control_steps == 0) {
                firing = position_control(sigma, state.attitude);
                const Vec3 s_att = attitude_sliding_output(state.attitude, state.rate, Quaternion::Identity(),
                                                           cc.attitude.attitude_gain);
                const StwOutput att = stw_attitude(s_att, stw_, cc.attitude, static_cast<double>(control_steps) * dt);
                stw_ = att.state;
                wheel = wheel_torque(att.torque, cc.attitude.torque_limit);
                if (firing.word != last_word) ++res.thruster_switches;
                last_word = firing.word;
                ++res.control_ticks;
            }

            const double sig_inf = sigma.lpNorm<Eigen::Infinity>();
            if (reached_in_interval) {
                res.max_sliding_residual = std::max(res.max_sliding_residual, sig_inf);
            } else if (sig_inf <= band) {
                reached_in_interval = true;
            }

            if (sink) {
                TelemetryRow row;
                row.t = mission_time_ + t;
                row.state = state;
                row.sigma = sigma;
                row.force_body = firing.loads.force_body;
                row.word = firing.word;
                row.phase = phase_index;
                if (!spec.obstacles.empty()) row.min_obstacle_distance = clearance(state.position, t);
                if (spec.cone) row.cone_margin = cone_margin(state.position, *spec.cone);
                sink(row);
            }

            const ExternalLoads ext = disturbances_.total(state, models_.orbit, models_.body, mission_time_ + t);
            ActuatorLoads act = firing.loads;
            act.torque_body += wheel;
            try {
                state = step(state, act, ext, models_.orbit, models_.body, dt);
            } catch (const PropellantExhausted&) {
                res.propellant_out = true;
                res.status = PhaseStatus::PropellantOut;
                res.control_effort += act.thrust_sum * dt;
                ++k;
                break;
            }
            res.control_effort += act.thrust_sum * dt;

            const double c = clearance(state.position, t + dt);
            res.min_clearance = std::min(res.min_clearance, c);
            if (c < keep_out) {
                res.collision = true;
                res.status = PhaseStatus::Collision;
                ++k;
                break;
            }
            if (spec.cone && cone_margin(state.position, *spec.cone) < 0.0) res.cone_breach = true;
        }
        if (reached_in_interval) ++intervals_reached;

        res.steps = k;
        res.elapsed = static_cast<double>(k) * dt;
        res.fuel = m0 - state.mass;
        res.final_position = state.position;
        res.final_error = state.position - spec.goal;
        res.reached_fraction = res.guidance_ticks > 0
                                   ? static_cast<double>(intervals_reached) / static_cast<double>(res.guidance_ticks)
                                   : 0.0;
        mission_time_ += res.elapsed;
        return res;
    }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream)};
        std::array<std::uint32_t, 2> out{};
        seq.generate(out.begin(), out.end());
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

private:
    static ThrusterBank make_bank(const ModelConfig& m, std::uint64_t seed) {
        const std::uint64_t s = derive_seed(seed, 2);
        if (m.controller.type == ControllerType::Simplex) {
            return ThrusterBank::simplex(m.controller.simplex, m.body.side, m.thruster_errors,
                                         m.guidance.thrust_reduction, s);
        }
        return ThrusterBank::componentwise(m.controller.componentwise_thrust, m.body.side, m.thruster_errors,
                                           m.guidance.thrust_reduction, s);
    }

    FiringResult position_control(const Vec3& sigma, const Quaternion& q) const {
        const ControllerConfig& cc = models_.controller;
        if (cc.type == ControllerType::Simplex) {
            return bank_.command_simplex(simplex_smc(sigma, cc.simplex, q).pair);
        }
        // sigma lives in LVLH; the component-wise thrusters are body-fixed.
        const Vec3 sigma_body = rotate_lvlh_to_body(sigma, q);
        const double k0 = cc.componentwise_per_direction * cc.componentwise_thrust;
        return bank_.command_componentwise(componentwise_smc(sigma_body, k0));
    }

    ModelConfig models_;
    std::uint64_t seed_;
    ThrusterBank bank_;
    DisturbanceModel disturbances_;
    StwState stw_;
    double mission_time_ = 0.0;
};

struct RunResult {
    ControllerType controller = ControllerType::Simplex;
    std::vector<PhaseResult> phases;
    SpacecraftState final_state;

    [[nodiscard]] double control_effort() const {
        double s = 0.0;
        for (const PhaseResult& p : phases) s += p.control_effort;
        return s;
    }
    [[nodiscard]] double fuel() const {
        double s = 0.0;
        for (const PhaseResult& p : phases) s += p.fuel;
        return s;
    }
    [[nodiscard]] double elapsed() const {
        double s = 0.0;
        for (const PhaseResult& p : phases) s += p.elapsed;
        return s;
    }
    [[nodiscard]] bool safety_violation() const {
        return std::any_of(phases.begin(), phases.end(),
                           [](const PhaseResult& p) { return p.collision || p.cone_breach; });
    }
    [[nodiscard]] bool aborted() const {
        return std::any_of(phases.begin(), phases.end(), [](const PhaseResult& p) {
            return p.status == PhaseStatus::Timeout || p.status == PhaseStatus::PropellantOut;
        });
    }
};

/// Runs the phases in order from `initial`, stopping after the first phase
/// that does not complete. `duration_cap` bounds the total simulated time;
/// a phase cut short by it ends as a timeout.
inline RunResult run_phases(const ModelConfig& models, const SpacecraftState& initial,
                            std::span<const PhaseSpec> phases, std::uint64_t seed,
                            const TelemetrySink& sink = {},
                            double duration_cap = std::numeric_limits<double>::infinity()) {
    if (!(duration_cap >= 0.0)) throw std::invalid_argument("duration cap must be nonnegative");
    Simulation sim(models, seed);
    RunResult out;
    out.controller = models.controller.type;
    SpacecraftState state = initial;
    double used = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        PhaseSpec spec = phases[i];
        spec.timeout = std::min(spec.timeout, std::max(0.0, duration_cap - used));
        out.phases.push_back(sim.run_phase(state, spec, static_cast<int>(i), sink));
        used += out.phases.back().elapsed;
        if (out.phases.back().status != PhaseStatus::Completed) break;
    }
    out.final_state = state;
    return out;
}

struct ComparisonReport {
    RunResult simplex;
    RunResult componentwise;
};

/// Same phases, seed and disturbances under both position controllers.
inline ComparisonReport compare_controllers(ModelConfig models, const SpacecraftState& initial,
                                            std::span<const PhaseSpec> phases, std::uint64_t seed,
                                            const TelemetrySink& simplex_sink = {},
                                            const TelemetrySink& componentwise_sink = {},
                                            double duration_cap = std::numeric_limits<double>::infinity()) {
    ComparisonReport r;
    models.controller.type = ControllerType::Simplex;
    r.simplex = run_phases(models, initial, phases, seed, simplex_sink, duration_cap);
    models.controller.type = ControllerType::Componentwise;
    r.componentwise = run_phases(models, initial, phases, seed, componentwise_sink, duration_cap);
    return r;
}

}  // namespace rvsim
