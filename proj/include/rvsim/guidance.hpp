#pragma once

// Artificial potential field guidance with velocity-dependent (dynamic
// radius) repulsion from moving obstacles.
//
// Attractive field:  U_a = 1/2 k_a |x_goal - x|^2
// Repulsive field:   U_rep = k_r/2 (1/eta - 1/R_dyn)^2   while eta < eta0 and
//                    the chaser closes on the obstacle, zero otherwise, with
//                    R_dyn = eta0 + (v_r . n_co)^2 / (2 a_max).

#include "rvsim/frames.hpp"
#include "rvsim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace rvsim {

inline constexpr double kSingularityDistance = 1.0;  // m
inline constexpr double kStallField = 1e-9;

struct ApfGains {
    double attractive_gain = 1.0;
    double repulsive_gain = 1e8;
    double influence_distance = 300.0;  // eta0, m
    double max_speed = 1.0;             // m/s
    double thrust_reduction = 0.5;      // f, N
    double available_thrust = 3.0;      // u_x, N
    /// Scales the y and z components of the attractive force. Above 1 the
    /// chaser converges onto the V-bar axis instead of keeping its bearing.
    double lateral_weight = 1.0;

    bool operator==(const ApfGains&) const = default;
};

/// Per-obstacle repulsion parameters resolved for one guidance evaluation.
struct RepulsiveParams {
    double gain = 1e4;
    double influence = 300.0;  // m
    double max_accel = 1.0;    // a_max, m/s^2
};

struct RepulsiveForce {
    Vec3 radial = Vec3::Zero();    // along the chaser -> obstacle line
    Vec3 steering = Vec3::Zero();  // orthogonal detour component

    [[nodiscard]] Vec3 total() const { return radial + steering; }
    [[nodiscard]] bool active() const { return !radial.isZero(0.0) || !steering.isZero(0.0); }
};

struct GuidanceCommand {
    Vec3 desired_velocity = Vec3::Zero();
    Vec3 attractive = Vec3::Zero();
    Vec3 repulsive_radial = Vec3::Zero();
    Vec3 repulsive_steering = Vec3::Zero();
    Vec3 field = Vec3::Zero();
    Vec3 direction = Vec3::Zero();  // E_U
    bool stalled = false;
};

/// F_a = k_a (x_goal - x).
inline Vec3 attractive_force(const Vec3& x, const Vec3& goal, double gain) {
    return gain * (goal - x);
}

/// a_max = (u_x - f) / (sqrt(2) m).
inline double braking_accel(double available_thrust, double thrust_reduction, double mass) {
    return (available_thrust - thrust_reduction) / (std::numbers::sqrt2 * mass);
}

/// R_dyn = eta0 + v_rn^2 / (2 a_max).
inline double dynamic_radius(double closing_speed, double influence, double max_accel) {
    if (!(max_accel > 0.0)) throw std::invalid_argument("dynamic_radius: a_max must be positive");
    return influence + closing_speed * closing_speed / (2.0 * max_accel);
}

struct RepulsiveGradient {
    Vec3 position = Vec3::Zero();  // dU/dx
    Vec3 velocity = Vec3::Zero();  // dU/dv
};

/// Analytic gradients of U_rep; zero outside the activation set.
inline RepulsiveGradient repulsive_gradient(const Vec3& x, const Vec3& v, const Vec3& obs_pos,
                                            const Vec3& obs_vel, const RepulsiveParams& p) {
    const Vec3 to_obs = obs_pos - x;
    const double dist = to_obs.norm();
    if (dist <= 0.0) return {};
    const Vec3 n = to_obs / dist;
    const Vec3 vr = v - obs_vel;
    const double vrn = vr.dot(n);
    if (!(dist < p.influence && vrn > 0.0)) return {};

    const double eta = std::max(dist, kSingularityDistance);
    const double r_dyn = dynamic_radius(vrn, p.influence, p.max_accel);
    const double gap = 1.0 / eta - 1.0 / r_dyn;

    // d(v_r . n)/dx = -(v_r - (v_r . n) n) / |x_o - x|
    const Vec3 vr_perp = vr - vrn * n;
    const Vec3 grad_x_vrn = -vr_perp / dist;
    const Vec3 grad_x_rdyn = (vrn / p.max_accel) * grad_x_vrn;
    const Vec3 grad_v_rdyn = (vrn / p.max_accel) * n;
    const Vec3 grad_x_eta = dist > kSingularityDistance ? Vec3(-n) : Vec3::Zero();

    RepulsiveGradient g;
    g.position = gap * (p.gain / (r_dyn * r_dyn) * grad_x_rdyn - p.gain / (eta * eta) * grad_x_eta);
    g.velocity = gap * p.gain / (r_dyn * r_dyn) * grad_v_rdyn;
    return g;
}

/// Negative gradient of the repulsive potential in position and velocity,
/// split into the component along n_co and its orthogonal complement.
inline RepulsiveForce repulsive_force(const Vec3& x, const Vec3& v, const Vec3& obs_pos,
                                      const Vec3& obs_vel, const RepulsiveParams& p) {
    const RepulsiveGradient g = repulsive_gradient(x, v, obs_pos, obs_vel, p);
    const Vec3 f = -g.position - g.velocity;
    if (f.isZero(0.0)) return {};
    const Vec3 n = (obs_pos - x).normalized();
    RepulsiveForce out;
    out.radial = f.dot(n) * n;
    out.steering = f - out.radial;
    return out;
}

inline RepulsiveForce repulsive_force(const Vec3& x, const Vec3& v, const ObstacleTrack& track,
                                      const RepulsiveParams& p) {
    if (!track.detected) return {};
    return repulsive_force(x, v, track.position, track.velocity, p);
}

/// U_rep evaluated directly; zero outside the activation set.
inline double repulsive_potential(const Vec3& x, const Vec3& v, const Vec3& obs_pos,
                                  const Vec3& obs_vel, const RepulsiveParams& p) {
    const Vec3 to_obs = obs_pos - x;
    const double dist = to_obs.norm();
    if (dist <= 0.0) return 0.0;
    const double vrn = (v - obs_vel).dot(to_obs / dist);
    if (!(dist < p.influence && vrn > 0.0)) return 0.0;
    const double eta = std::max(dist, kSingularityDistance);
    const double gap = 1.0 / eta - 1.0 / dynamic_radius(vrn, p.influence, p.max_accel);
    return 0.5 * p.gain * gap * gap;
}

inline Vec3 total_field(const Vec3& attractive, std::span<const RepulsiveForce> repulsive) {
    Vec3 f = attractive;
    for (const RepulsiveForce& r : repulsive) f += r.radial + r.steering;
    return f;
}

/// x_max * F / |F|, or `previous` when the field vanishes.
inline Vec3 desired_velocity(const Vec3& field, double max_speed, const Vec3& previous) {
    const double mag = field.norm();
    if (!(mag > kStallField)) return previous;
    return max_speed * field / mag;
}

/// Stateful wrapper that remembers the last command for the stall guard.
class ApfGuidance {
public:
    explicit ApfGuidance(ApfGains gains) : gains_(gains) {}

    [[nodiscard]] const ApfGains& gains() const { return gains_; }
    void set_max_speed(double s) { gains_.max_speed = s; }

    RepulsiveParams params_for(double mass, double sensor_range) const {
        return {gains_.repulsive_gain, std::min(gains_.influence_distance, sensor_range),
                braking_accel(gains_.available_thrust, gains_.thrust_reduction, mass)};
    }

    GuidanceCommand update(const Vec3& x, const Vec3& v, double mass, const Vec3& goal,
                           std::span<const ObstacleTrack> tracks, double sensor_range) {
        GuidanceCommand cmd;
        cmd.attractive = attractive_force(x, goal, gains_.attractive_gain);
        cmd.attractive.tail<2>() *= gains_.lateral_weight;
        const RepulsiveParams p = params_for(mass, sensor_range);
        for (const ObstacleTrack& tr : tracks) {
            const RepulsiveForce r = repulsive_force(x, v, tr, p);
            cmd.repulsive_radial += r.radial;
            cmd.repulsive_steering += r.steering;
        }
        cmd.field = cmd.attractive + cmd.repulsive_radial + cmd.repulsive_steering;
        cmd.stalled = !(cmd.field.norm() > kStallField);
        cmd.direction = cmd.stalled ? Vec3::Zero() : Vec3(cmd.field.normalized());
        cmd.desired_velocity = desired_velocity(cmd.field, gains_.max_speed, previous_);
        previous_ = cmd.desired_velocity;
        return cmd;
    }

private:
    ApfGains gains_;
    Vec3 previous_ = Vec3::Zero();
};

}  // namespace rvsim
