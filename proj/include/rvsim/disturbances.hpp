#pragma once

// Environmental disturbances for a LEO rendezvous: aerodynamic drag, J2,
// solar radiation pressure (force and torque) and gravity-gradient torque.
// Forces are returned in LVLH, torques in the body frame.

#include "rvsim/dynamics.hpp"
#include "rvsim/frames.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace rvsim {

enum class J2Mode { Formula, RandomBounded };

inline std::string to_string(J2Mode m) {
    return m == J2Mode::Formula ? "formula" : "random";
}

struct DisturbanceConfig {
    double air_density = 1e-12;       // kg/m^3
    double solar_constant = 1370.0;   // W/m^2
    double light_speed = 3e8;         // m/s
    double solar_area = 1.44;         // m^2, projected area normal to the sun
    Vec3 sun_direction = Vec3::Ones().normalized();  // LVLH, constant per run
    Vec3 pressure_offset{std::sqrt(0.5), -std::sqrt(0.5), 0.0};  // m, body; CoM -> centre of pressure

    J2Mode j2_mode = J2Mode::RandomBounded;
    double j2_bound = 1e-3;            // N per axis in random mode
    double j2_resample_period = 1.0;   // s between random draws
    double inclination = 0.0;          // rad, formula mode

    Vec3 torque_bias = Vec3::Constant(1e-4);  // Nm, body

    bool drag = true;
    bool j2 = true;
    bool solar_force = true;
    bool solar_torque = true;
    bool gravity_gradient = true;
    bool bias_torque = true;

    bool operator==(const DisturbanceConfig&) const = default;
};

/// F_AD = 1/2 rho C_D A V^2 along -V-bar.
inline Vec3 drag_force(const OrbitParams& orbit, const BodyProperties& props,
                       const DisturbanceConfig& cfg) {
    const double v = orbit.speed();
    const double mag = 0.5 * cfg.air_density * props.drag_coefficient * props.cross_section() * v * v;
    return {-mag, 0.0, 0.0};
}

/// m_c * 3 J2 mu R_E^2 / (2 r^4) [N].
inline double j2_coefficient(double mass, const OrbitParams& orbit) {
    const double r2 = orbit.radius * orbit.radius;
    return mass * 3.0 * orbit.j2 * orbit.mu * orbit.earth_radius * orbit.earth_radius /
           (2.0 * r2 * r2);
}

/// Closed-form J2 force with true anomaly theta = omega0 * t.
inline Vec3 j2_force_formula(double mass, const OrbitParams& orbit, double inclination, double t) {
    const double si = std::sin(inclination), ci = std::cos(inclination);
    const double theta = orbit.rate() * t;
    const double st = std::sin(theta), ct = std::cos(theta);
    const Vec3 shape{1.0 - 3.0 * si * si * st, 2.0 * si * si * st * ct, 2.0 * si * ci * st};
    return -j2_coefficient(mass, orbit) * shape;
}

/// Solar pressure p_s = I_s / c [N/m^2].
inline double solar_pressure(const DisturbanceConfig& cfg) {
    return cfg.solar_constant / cfg.light_speed;
}

/// (1 + K) p_s A_perp along the configured sun direction, LVLH.
inline Vec3 solar_force(const BodyProperties& props, const DisturbanceConfig& cfg) {
    const double mag = (1.0 + props.reflectivity) * solar_pressure(cfg) * cfg.solar_area;
    return mag * cfg.sun_direction.normalized();
}

/// r_s x F_s, body frame.
inline Vec3 solar_torque(const BodyProperties& props, const DisturbanceConfig& cfg,
                         const Quaternion& attitude = Quaternion::Identity()) {
    const Vec3 f_body = rotate_lvlh_to_body(solar_force(props, cfg), attitude);
    return cfg.pressure_offset.cross(f_body);
}

/// 3 n^2 r x (J r), with r the unit planet -> spacecraft vector in body axes.
inline Vec3 gravity_gradient_torque(const Vec3& r_hat_body, const OrbitParams& orbit,
                                    const BodyProperties& props) {
    const double n2 = orbit.rate() * orbit.rate();
    const Vec3 r = r_hat_body.normalized();
    return 3.0 * n2 * r.cross(props.inertia.cwiseProduct(r));
}

inline Vec3 gravity_gradient_torque(const SpacecraftState& s, const OrbitParams& orbit,
                                    const BodyProperties& props) {
    // Planet -> spacecraft is -R-bar.
    return gravity_gradient_torque(rotate_lvlh_to_body(-Vec3::UnitZ(), s.attitude), orbit, props);
}

/// Per-run disturbance source. Owns the seeded generator used for the
/// random-bounded J2 injection, so a fixed seed reproduces the sequence.
class DisturbanceModel {
public:
    DisturbanceModel(DisturbanceConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {}

    [[nodiscard]] const DisturbanceConfig& config() const { return cfg_; }

    /// J2 force at time t. In random mode a new uniform draw in
    /// [-bound, bound]^3 is taken every resample period and held in between.
    Vec3 j2_force(const SpacecraftState& s, const OrbitParams& orbit, double t) {
        if (cfg_.j2_mode == J2Mode::Formula) {
            return j2_force_formula(s.mass, orbit, cfg_.inclination, t);
        }
        if (!drawn_ || t >= next_draw_) {
            std::uniform_real_distribution<double> u(-cfg_.j2_bound, cfg_.j2_bound);
            held_j2_ = Vec3(u(rng_), u(rng_), u(rng_));
            drawn_ = true;
            next_draw_ = t + cfg_.j2_resample_period;
        }
        return held_j2_;
    }

    /// Sum of the enabled terms: force in LVLH, torque in body axes.
    ExternalLoads total(const SpacecraftState& s, const OrbitParams& orbit,
                        const BodyProperties& props, double t) {
        ExternalLoads out;
        if (cfg_.drag) out.force_lvlh += drag_force(orbit, props, cfg_);
        if (cfg_.j2) out.force_lvlh += j2_force(s, orbit, t);
        if (cfg_.solar_force) out.force_lvlh += solar_force(props, cfg_);
        if (cfg_.solar_torque) out.torque_body += solar_torque(props, cfg_, s.attitude);
        if (cfg_.gravity_gradient) out.torque_body += gravity_gradient_torque(s, orbit, props);
        if (cfg_.bias_torque) out.torque_body += cfg_.torque_bias;
        return out;
    }

private:
    DisturbanceConfig cfg_;
    std::mt19937_64 rng_;
    Vec3 held_j2_ = Vec3::Zero();
    double next_draw_ = 0.0;
    bool drawn_ = false;
};

}  // namespace rvsim
