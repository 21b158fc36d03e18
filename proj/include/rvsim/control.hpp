#pragma once

// Sliding-mode position and attitude controllers.
//
// Position: first-order SMC on sigma = c_x (v - v_des), either with a moving
// simplex of four thrust directions (one thruster pair on per tick) or with a
// component-wise sign law. Attitude: super-twisting second-order SMC driving
// reaction-wheel torque.

#include "rvsim/frames.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace rvsim {

inline constexpr std::size_t kSimplexSize = 4;
inline constexpr double kConeTolerance = 1e-12;
inline constexpr double kDegenerateDet = 1e-12;

/// sigma_x = c_x (v - v_des).
inline Vec3 sliding_output(const Vec3& v, const Vec3& v_des, double c_x) {
    return c_x * (v - v_des);
}

/// Four body-frame thrust directions forming a simplex of vectors, one
/// thruster pair per direction.
struct SimplexConfig {
    std::array<Vec3, kSimplexSize> directions{
        Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(),
        Vec3(-1, 1, -1).normalized(), Vec3(-1, -1, 1).normalized()};
    std::array<double, kSimplexSize> max_thrust{1.5, 1.5, 1.5, 1.5};  // per thruster, N
    std::array<double, kSimplexSize> weights{0.25, 0.25, 0.25, 0.25}; // mu_i
    int thrusters_per_pair = 2;                                        // n

    /// |sum mu_i d_i|.
    [[nodiscard]] double closure_error() const {
        Vec3 s = Vec3::Zero();
        for (std::size_t i = 0; i < kSimplexSize; ++i) s += weights[i] * directions[i];
        return s.norm();
    }

    bool operator==(const SimplexConfig&) const = default;
};

class InvalidSimplex : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InvalidSimplex unless the directions are unit vectors with positive
/// weights summing to one and a vanishing weighted sum.
inline void validate_simplex(const SimplexConfig& cfg, double tol = 1e-9) {
    double wsum = 0.0;
    for (std::size_t i = 0; i < kSimplexSize; ++i) {
        if (!(cfg.weights[i] > 0.0)) throw InvalidSimplex("invalid simplex: weights must be positive");
        if (std::abs(cfg.directions[i].norm() - 1.0) > tol)
            throw InvalidSimplex("invalid simplex: direction " + std::to_string(i + 1) + " is not a unit vector");
        if (!(cfg.max_thrust[i] > 0.0)) throw InvalidSimplex("invalid simplex: thrust must be positive");
        wsum += cfg.weights[i];
    }
    if (std::abs(wsum - 1.0) > tol) throw InvalidSimplex("invalid simplex: weights must sum to 1");
    if (cfg.closure_error() > tol) throw InvalidSimplex("invalid simplex: sum mu_i d_i != 0");
    for (std::size_t h = 0; h < kSimplexSize; ++h) {
        Mat3 m;
        for (std::size_t i = 0, c = 0; i < kSimplexSize; ++i) {
            if (i != h) m.col(static_cast<Eigen::Index>(c++)) = cfg.directions[i];
        }
        if (std::abs(m.determinant()) < kDegenerateDet)
            throw InvalidSimplex("invalid simplex: directions other than " + std::to_string(h + 1) + " are coplanar");
    }
}

using Directions = std::array<Vec3, kSimplexSize>;

/// d_i = R_LVLH d_i^b.
inline Directions rotate_simplex(const SimplexConfig& cfg, const Quaternion& q) {
    Directions out;
    const Mat3 r = quat_to_dcm(q);
    for (std::size_t i = 0; i < kSimplexSize; ++i) out[i] = r * cfg.directions[i];
    return out;
}

struct ConeMembership {
    std::size_t cone = 0;
    /// Coefficients over all four directions; the entry for `cone` is zero.
    std::array<double, kSimplexSize> lambda{};
};

/// Least index h with sigma in cone(d_i : i != h), or nullopt for sigma = 0.
/// Throws InvalidSimplex if any three directions fail to span R^3.
inline std::optional<ConeMembership> cone_select(const Vec3& sigma, const Directions& d) {
    if (sigma.isZero(0.0)) return std::nullopt;
    std::optional<ConeMembership> best;
    double best_min = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < kSimplexSize; ++h) {
        Mat3 m;
        std::array<std::size_t, 3> cols{};
        for (std::size_t i = 0, c = 0; i < kSimplexSize; ++i) {
            if (i == h) continue;
            m.col(static_cast<Eigen::Index>(c)) = d[i];
            cols[c++] = i;
        }
        if (std::abs(m.determinant()) < kDegenerateDet) {
            throw InvalidSimplex("invalid simplex: directions without cone " + std::to_string(h + 1) +
                                 " are coplanar");
        }
        const Vec3 lam = m.partialPivLu().solve(sigma);
        ConeMembership cm;
        cm.cone = h;
        for (std::size_t c = 0; c < 3; ++c) cm.lambda[cols[c]] = lam(static_cast<Eigen::Index>(c));
        if (lam.minCoeff() >= -kConeTolerance) return cm;
        // Round-off can push a boundary point marginally outside every cone.
        if (lam.minCoeff() > best_min) {
            best_min = lam.minCoeff();
            best = cm;
        }
    }
    return best;
}

struct SimplexCommand {
    Vec3 force_body = Vec3::Zero();
    std::optional<std::size_t> pair;  // active pair, nullopt when all off
    std::uint8_t beta = 0;            // bit i set when pair i is on
};

/// Switching logic: if sigma lies in Q_h fire pair h, F = n T_max,h d_h^b.
inline SimplexCommand simplex_smc(const Vec3& sigma, const SimplexConfig& cfg, const Quaternion& q) {
    const auto cm = cone_select(sigma, rotate_simplex(cfg, q));
    SimplexCommand out;
    if (!cm) return out;
    const std::size_t h = cm->cone;
    out.pair = h;
    out.beta = static_cast<std::uint8_t>(1u << h);
    out.force_body = cfg.thrusters_per_pair * cfg.max_thrust[h] * cfg.directions[h];
    return out;
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// F = -K0 sgn(sigma), componentwise, sgn(0) = 0.
inline Vec3 componentwise_smc(const Vec3& sigma, double k0) {
    return {-k0 * sgn(sigma.x()), -k0 * sgn(sigma.y()), -k0 * sgn(sigma.z())};
}

struct StwGains {
    Vec3 k1 = Vec3::Constant(0.4);
    Vec3 k2 = Vec3::Constant(0.2);
    double torque_limit = 0.05;   // Nm, per wheel
    double attitude_gain = 0.2;   // c_att in sigma = omega + c_att * e, 1/s

    bool operator==(const StwGains&) const = default;
};

struct StwState {
    Vec3 integral = Vec3::Zero();  // w
};

struct StwOutput {
    Vec3 torque = Vec3::Zero();
    StwState state;
};

/// Super-twisting law per axis:
///   u = -k1 |s|^1/2 sgn(s) + w,   w' = -k2 sgn(s)
/// with w advanced by explicit Euler over dt. Both u and w are held within
/// the wheel torque limit.
inline StwOutput stw_attitude(const Vec3& sigma, const StwState& state, const StwGains& gains, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("stw_attitude: dt must be positive");
    const double lim = gains.torque_limit;
    StwOutput out;
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double s = sigma(i);
        const double u = -gains.k1(i) * std::sqrt(std::abs(s)) * sgn(s) + state.integral(i);
        out.torque(i) = std::clamp(u, -lim, lim);
        out.state.integral(i) = std::clamp(state.integral(i) - gains.k2(i) * sgn(s) * dt, -lim, lim);
    }
    return out;
}

/// Attitude sliding variable omega + c_att * e, where e is the vector part
/// of the error quaternion q_ref^-1 (x) q taken on the short-rotation side.
inline Vec3 attitude_sliding_output(const Quaternion& q, const Vec3& rate, const Quaternion& q_ref,
                                    double attitude_gain) {
    Quaternion err = q_ref.conjugate() * q;
    if (err.w() < 0.0) err.coeffs() *= -1.0;
    return rate + attitude_gain * err.vec();
}

}  // namespace rvsim
