#pragma once

// Random points for checking the repulsive field.

#include "rvsim/guidance.hpp"

#include <random>

namespace apf {

using rvsim::Vec3;

struct Sample {
    Vec3 x, v, obs, obs_v;
};

// Inside the activation set, kept away from eta = 0, eta0 = 300 m and the
// v_r . n = 0 boundary.
inline Sample activation_sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> dist(20.0, 280.0), closing(0.05, 1.0), lateral(-0.5, 0.5);
    for (;;) {
        Sample s;
        s.obs = Vec3(u(rng), u(rng), u(rng)) * 1000.0;
        const Vec3 dir = Vec3(u(rng), u(rng), u(rng)).normalized();
        s.x = s.obs - dist(rng) * dir;
        s.obs_v = Vec3(u(rng), u(rng), u(rng)) * 0.2;
        Vec3 perp = dir.cross(Vec3(u(rng), u(rng), u(rng)));
        if (perp.norm() < 1e-3) continue;
        perp.normalize();
        s.v = s.obs_v + closing(rng) * dir + lateral(rng) * perp;
        return s;
    }
}

// Anywhere, active or not.
inline Sample any_sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Sample s;
    s.x = Vec3(u(rng), u(rng), u(rng)) * 600.0;
    s.v = Vec3(u(rng), u(rng), u(rng));
    s.obs = Vec3(u(rng), u(rng), u(rng)) * 600.0;
    s.obs_v = Vec3(u(rng), u(rng), u(rng)) * 0.3;
    return s;
}

inline bool in_activation_set(const Sample& s, double influence) {
    const Vec3 d = s.obs - s.x;
    return d.norm() < influence && (s.v - s.obs_v).dot(d.normalized()) > 0.0;
}

/// Worst relative error of the analytic x and v gradients against central
/// differences of the potential.
struct GradientCheck {
    double position = 0.0;
    double velocity = 0.0;
};

inline GradientCheck check_gradient(const Sample& s, const rvsim::RepulsiveParams& p) {
    using rvsim::repulsive_potential;
    const rvsim::RepulsiveGradient g = rvsim::repulsive_gradient(s.x, s.v, s.obs, s.obs_v, p);
    const double hx = 1e-3, hv = 1e-5;
    Vec3 fd_x, fd_v;
    for (int k = 0; k < 3; ++k) {
        const Vec3 ex = hx * Vec3::Unit(k), ev = hv * Vec3::Unit(k);
        fd_x(k) = (repulsive_potential(s.x + ex, s.v, s.obs, s.obs_v, p) -
                   repulsive_potential(s.x - ex, s.v, s.obs, s.obs_v, p)) / (2.0 * hx);
        fd_v(k) = (repulsive_potential(s.x, s.v + ev, s.obs, s.obs_v, p) -
                   repulsive_potential(s.x, s.v - ev, s.obs, s.obs_v, p)) / (2.0 * hv);
    }
    return {(fd_x - g.position).norm() / g.position.norm(), (fd_v - g.velocity).norm() / g.velocity.norm()};
}

}  // namespace apf
