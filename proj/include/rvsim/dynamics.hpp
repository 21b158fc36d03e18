#pragma once

// Coupled translational (Hill / Clohessy-Wiltshire) and rotational
// (quaternion kinematics + Euler equations) dynamics with mass depletion,
// propagated by a fixed-step RK4 integrator.

#include "rvsim/frames.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvsim {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// Circular reference orbit of the Target.
struct OrbitParams {
    double mu = 3.986e14;           // m^3/s^2
    double radius = 6878.0e3;       // m
    double earth_radius = 6378.0e3; // m
    double j2 = 1.08263e-6;

    /// Orbital rate omega0 = sqrt(mu / r^3) [rad/s].
    [[nodiscard]] double rate() const { return std::sqrt(mu / (radius * radius * radius)); }
    /// Orbital speed V = omega0 * r [m/s].
    [[nodiscard]] double speed() const { return rate() * radius; }
    [[nodiscard]] double period() const { return 2.0 * std::numbers::pi / rate(); }

    bool operator==(const OrbitParams&) const = default;
};

/// Chaser body: a cube of side `side` with diagonal inertia.
struct BodyProperties {
    double side = 1.2;                      // m
    Vec3 inertia = Vec3::Constant(144.0);   // kg m^2, principal moments
    double drag_coefficient = 2.2;
    double reflectivity = 1.0;              // K in [0, 1]
    double specific_impulse = 220.0;        // s
    double dry_mass = 400.0;                // kg

    [[nodiscard]] double cross_section() const { return side * side; }
    /// Half the space diagonal of the cube, used as the keep-out margin.
    [[nodiscard]] double half_diagonal() const { return side * std::sqrt(3.0) / 2.0; }

    bool operator==(const BodyProperties&) const = default;
};

struct SpacecraftState {
    Vec3 position = Vec3::Zero();            // m, LVLH
    Vec3 velocity = Vec3::Zero();            // m/s, LVLH
    Quaternion attitude = Quaternion::Identity();  // body -> LVLH
    Vec3 rate = Vec3::Zero();                // rad/s, body
    double mass = 600.0;                     // kg
};

/// Forces and torques produced by the actuators, held over one step.
/// `thrust_sum` is the sum of the individual thruster magnitudes and drives
/// propellant consumption.
struct ActuatorLoads {
    Vec3 force_body = Vec3::Zero();
    Vec3 torque_body = Vec3::Zero();
    double thrust_sum = 0.0;
};

/// Environmental disturbances, held over one step.
struct ExternalLoads {
    Vec3 force_lvlh = Vec3::Zero();
    Vec3 torque_body = Vec3::Zero();
};

class PropellantExhausted : public std::runtime_error {
public:
    explicit PropellantExhausted(double mass)
        : std::runtime_error("propellant exhausted: mass " + std::to_string(mass) +
                             " kg reached the dry-mass floor"),
          mass_(mass) {}
    [[nodiscard]] double mass() const { return mass_; }

private:
    double mass_;
};

/// Hill equations: translational acceleration under total LVLH force.
inline Vec3 hill_accel(const SpacecraftState& s, const Vec3& force_lvlh, const OrbitParams& orbit) {
    if (!force_lvlh.allFinite()) {
        throw std::invalid_argument("hill_accel: non-finite force");
    }
    if (!(s.mass > 0.0)) {
        throw std::invalid_argument("hill_accel: mass must be positive");
    }
    const double w = orbit.rate();
    const Vec3& r = s.position;
    const Vec3& v = s.velocity;
    return {force_lvlh.x() / s.mass + 2.0 * w * v.z(),
            force_lvlh.y() / s.mass - w * w * r.y(),
            force_lvlh.z() / s.mass - 2.0 * w * v.x() + 3.0 * w * w * r.z()};
}

struct AttitudeRates {
    Eigen::Vector4d attitude_dot;  // (w, x, y, z)
    Vec3 rate_dot;
};

/// q_dot = 1/2 q (x) (0, omega);  omega_dot = J^-1 (M - omega x J omega).
inline AttitudeRates attitude_derivatives(const SpacecraftState& s, const Vec3& torque_body,
                                          const BodyProperties& props) {
    const Quaternion& q = s.attitude;
    const Vec3& w = s.rate;
    const Quaternion qdot = q * Quaternion(0.0, w.x(), w.y(), w.z());
    AttitudeRates out;
    out.attitude_dot << 0.5 * qdot.w(), 0.5 * qdot.x(), 0.5 * qdot.y(), 0.5 * qdot.z();
    const Vec3 jw = props.inertia.cwiseProduct(w);
    out.rate_dot = (torque_body - w.cross(jw)).cwiseQuotient(props.inertia);
    return out;
}

/// Propellant flow for a body force, with |F| = |Fx| + |Fy| + |Fz|.
inline double mass_flow(const Vec3& force_body, const BodyProperties& props) {
    return force_body.lpNorm<1>() / (kStandardGravity * props.specific_impulse);
}

/// Propellant flow for a given summed thruster magnitude [N].
inline double mass_flow(double thrust_sum, const BodyProperties& props) {
    return std::abs(thrust_sum) / (kStandardGravity * props.specific_impulse);
}

namespace detail {

using StateVector = Eigen::Matrix<double, 14, 1>;

inline StateVector pack(const SpacecraftState& s) {
    StateVector x;
    x.segment<3>(0) = s.position;
    x.segment<3>(3) = s.velocity;
    x(6) = s.attitude.w();
    x(7) = s.attitude.x();
    x(8) = s.attitude.y();
    x(9) = s.attitude.z();
    x.segment<3>(10) = s.rate;
    x(13) = s.mass;
    return x;
}

inline SpacecraftState unpack(const StateVector& x) {
    SpacecraftState s;
    s.position = x.segment<3>(0);
    s.velocity = x.segment<3>(3);
    s.attitude = Quaternion(x(6), x(7), x(8), x(9));
    s.rate = x.segment<3>(10);
    s.mass = x(13);
    return s;
}

inline StateVector derivative(const StateVector& x, const ActuatorLoads& act,
                              const ExternalLoads& ext, const OrbitParams& orbit,
                              const BodyProperties& props) {
    const SpacecraftState s = unpack(x);
    const Vec3 force = s.attitude * act.force_body + ext.force_lvlh;
    const AttitudeRates att = attitude_derivatives(s, act.torque_body + ext.torque_body, props);
    StateVector dx;
    dx.segment<3>(0) = s.velocity;
    dx.segment<3>(3) = hill_accel(s, force, orbit);
    dx.segment<4>(6) = att.attitude_dot;
    dx.segment<3>(10) = att.rate_dot;
    dx(13) = -mass_flow(act.thrust_sum, props);
    return dx;
}

}  // namespace detail

/// Advances the state by `dt` with classic RK4, loads held constant over the
/// step. The attitude quaternion is renormalised afterwards. Throws
/// PropellantExhausted if the mass reaches the dry-mass floor.
inline SpacecraftState step(const SpacecraftState& state, const ActuatorLoads& act,
                            const ExternalLoads& ext, const OrbitParams& orbit,
                            const BodyProperties& props, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    using detail::derivative;
    const detail::StateVector x0 = detail::pack(state);
    const detail::StateVector k1 = derivative(x0, act, ext, orbit, props);
    const detail::StateVector k2 = derivative(x0 + 0.5 * dt * k1, act, ext, orbit, props);
    const detail::StateVector k3 = derivative(x0 + 0.5 * dt * k2, act, ext, orbit, props);
    const detail::StateVector k4 = derivative(x0 + dt * k3, act, ext, orbit, props);
    const detail::StateVector x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    SpacecraftState next = detail::unpack(x1);
    next.attitude.normalize();
    if (next.mass <= props.dry_mass) {
        throw PropellantExhausted(next.mass);
    }
    return next;
}

/// Convenience overload: thruster consumption from the L1 norm of the body
/// force.
inline SpacecraftState step(const SpacecraftState& state, const Vec3& force_body,
                            const Vec3& torque_body, const ExternalLoads& ext,
                            const OrbitParams& orbit, const BodyProperties& props, double dt) {
    return step(state, ActuatorLoads{force_body, torque_body, force_body.lpNorm<1>()}, ext, orbit,
                props, dt);
}

}  // namespace rvsim
