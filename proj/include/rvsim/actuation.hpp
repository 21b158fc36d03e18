#pragma once

// Thruster banks and reaction wheels: maps controller outputs to firings,
// injects per-run thruster errors and aggregates body force and torque.

#include "rvsim/control.hpp"
#include "rvsim/dynamics.hpp"
#include "rvsim/frames.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvsim {

enum class Layout { Simplex8, Componentwise12 };

inline std::string to_string(Layout l) {
    return l == Layout::Simplex8 ? "simplex-8" : "componentwise-12";
}

/// Systematic thruster errors, drawn once per run.
struct ThrusterErrorModel {
    bool enabled = true;
    /// Upper bound of the uniform magnitude-reduction fraction; negative means
    /// f / (n T_max), the bound the controller is designed for.
    double max_reduction = -1.0;
    double misalignment = 1.0 * std::numbers::pi / 180.0;  // cone half-angle, rad

    bool operator==(const ThrusterErrorModel&) const = default;
};

struct Thruster {
    Vec3 direction = Vec3::UnitX();  // nominal unit force direction, body
    Vec3 actual_direction = Vec3::UnitX();
    Vec3 position = Vec3::Zero();    // mounting point relative to CoM, body
    double max_thrust = 1.0;         // N
    double reduction = 0.0;          // fraction of max_thrust lost
    std::size_t group = 0;           // thrusters fired together share a magnitude error

    [[nodiscard]] Vec3 force() const { return (1.0 - reduction) * max_thrust * actual_direction; }
};

struct FiringResult {
    ActuatorLoads loads;
    std::uint16_t word = 0;  // bit k set when thruster k fires
};

class ThrusterBank {
public:
    [[nodiscard]] Layout layout() const { return layout_; }
    [[nodiscard]] const std::vector<Thruster>& thrusters() const { return thrusters_; }
    [[nodiscard]] double total_thrust() const {
        double s = 0.0;
        for (const Thruster& t : thrusters_) s += t.max_thrust;
        return s;
    }

    /// Eight thrusters in four pairs; pair i is thrusters i and i + 4, both
    /// along d_i and mounted at +/- half a side along a face normal.
    static ThrusterBank simplex(const SimplexConfig& cfg, double side, const ThrusterErrorModel& errors,
                                double thrust_bound, std::uint64_t seed) {
        ThrusterBank b;
        b.layout_ = Layout::Simplex8;
        b.thrusters_.resize(2 * kSimplexSize);
        const std::array<Vec3, kSimplexSize> arm{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitX()};
        for (std::size_t i = 0; i < kSimplexSize; ++i) {
            for (std::size_t m = 0; m < 2; ++m) {
                Thruster& t = b.thrusters_[i + m * kSimplexSize];
                t.direction = t.actual_direction = cfg.directions[i];
                t.position = (m == 0 ? 0.5 : -0.5) * side * arm[i];
                t.max_thrust = cfg.max_thrust[i];
                t.group = i;
            }
        }
        b.apply_errors(errors, thrust_bound, cfg.thrusters_per_pair, seed);
        return b;
    }

    /// Twelve thrusters, two per axis and sign. Thruster 4a + 2s + k fires
    /// along (s == 0 ? +1 : -1) e_a from the opposite face, offset +/- side/4
    /// along the next axis so the pair torque cancels.
    static ThrusterBank componentwise(double max_thrust, double side, const ThrusterErrorModel& errors,
                                      double thrust_bound, std::uint64_t seed) {
        ThrusterBank b;
        b.layout_ = Layout::Componentwise12;
        b.thrusters_.resize(12);
        for (int a = 0; a < 3; ++a) {
            const Vec3 ea = Vec3::Unit(a);
            const Vec3 eb = Vec3::Unit((a + 1) % 3);
            for (int s = 0; s < 2; ++s) {
                const double sign = s == 0 ? 1.0 : -1.0;
                for (int k = 0; k < 2; ++k) {
                    Thruster& t = b.thrusters_[static_cast<std::size_t>(4 * a + 2 * s + k)];
                    t.direction = t.actual_direction = sign * ea;
                    t.position = -sign * 0.5 * side * ea + (k == 0 ? 0.25 : -0.25) * side * eb;
                    t.max_thrust = max_thrust;
                    t.group = static_cast<std::size_t>(2 * a + s);
                }
            }
        }
        b.apply_errors(errors, thrust_bound, 2, seed);
        return b;
    }

    /// Fires both members of pair h (or nothing).
    [[nodiscard]] FiringResult command_simplex(std::optional<std::size_t> pair) const {
        if (layout_ != Layout::Simplex8) throw std::logic_error("command_simplex: bank is not simplex-8");
        FiringResult out;
        if (!pair) return out;
        if (*pair >= kSimplexSize) throw std::out_of_range("command_simplex: invalid pair index");
        fire(*pair, out);
        fire(*pair + kSimplexSize, out);
        return out;
    }

    /// For each axis with a nonzero command fires the two thrusters of the
    /// matching sign. Components must be 0 or +/- 2 T_max.
    [[nodiscard]] FiringResult command_componentwise(const Vec3& f_cmd) const {
        if (layout_ != Layout::Componentwise12)
            throw std::logic_error("command_componentwise: bank is not componentwise-12");
        FiringResult out;
        for (int a = 0; a < 3; ++a) {
            const double c = f_cmd(a);
            if (c == 0.0) continue;
            const int s = c > 0.0 ? 0 : 1;
            const std::size_t first = static_cast<std::size_t>(4 * a + 2 * s);
            const double pair_thrust = thrusters_[first].max_thrust + thrusters_[first + 1].max_thrust;
            if (std::abs(std::abs(c) - pair_thrust) > 1e-9 * pair_thrust) {
                throw std::invalid_argument("command_componentwise: axis command " + std::to_string(c) +
                                            " N is not 0 or +/-" + std::to_string(pair_thrust) + " N");
            }
            fire(first, out);
            fire(first + 1, out);
        }
        return out;
    }

    /// Overrides the error state of one thruster (fault injection).
    void set_error(std::size_t k, double reduction, const Vec3& actual_direction) {
        Thruster& t = thrusters_.at(k);
        t.reduction = reduction;
        t.actual_direction = actual_direction.normalized();
    }

private:
    void fire(std::size_t k, FiringResult& out) const {
        const Thruster& t = thrusters_[k];
        const Vec3 f = t.force();
        out.loads.force_body += f;
        out.loads.torque_body += t.position.cross(f);
        out.loads.thrust_sum += f.norm();
        out.word = static_cast<std::uint16_t>(out.word | (1u << k));
    }

    void apply_errors(const ThrusterErrorModel& e, double thrust_bound, int per_group, std::uint64_t seed) {
        if (!e.enabled) return;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> group_draw;
        for (Thruster& t : thrusters_) {
            if (t.group >= group_draw.size()) group_draw.resize(t.group + 1, -1.0);
            if (group_draw[t.group] < 0.0) group_draw[t.group] = unit(rng);
        }
        for (Thruster& t : thrusters_) {
            const double bound = e.max_reduction >= 0.0 ? e.max_reduction
                                                         : thrust_bound / (per_group * t.max_thrust);
            t.reduction = bound * group_draw[t.group];
            const double tilt = e.misalignment * unit(rng);
            const double azimuth = 2.0 * std::numbers::pi * unit(rng);
            t.actual_direction = misalign(t.direction, tilt, azimuth);
        }
    }

    static Vec3 misalign(const Vec3& d, double tilt, double azimuth) {
        const Vec3 helper = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        const Vec3 u = d.cross(helper).normalized();
        const Vec3 axis = Eigen::AngleAxisd(azimuth, d) * u;
        return (Eigen::AngleAxisd(tilt, axis) * d).normalized();
    }

    Layout layout_ = Layout::Simplex8;
    std::vector<Thruster> thrusters_;
};

/// Componentwise saturation of the wheel torque command.
inline Vec3 wheel_torque(const Vec3& m_cmd, double limit) {
    if (!(limit > 0.0)) throw std::invalid_argument("wheel_torque: limit must be positive");
    return m_cmd.cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace rvsim
