#pragma once

// Closed-form Clohessy-Wiltshire solution, written out independently of the
// propagator. x along V-bar, y along H-bar, z along R-bar (toward Earth).

#include <cmath>

namespace cw {

struct State {
    double x, y, z, vx, vy, vz;
};

inline State propagate(const State& s0, double n, double t) {
    const double c = std::cos(n * t), s = std::sin(n * t);
    State s1{};
    s1.x = s0.x + 6.0 * s0.z * (n * t - s) + s0.vx / n * (4.0 * s - 3.0 * n * t) + 2.0 * s0.vz / n * (1.0 - c);
    s1.z = s0.z * (4.0 - 3.0 * c) + 2.0 * s0.vx / n * (c - 1.0) + s0.vz / n * s;
    s1.y = s0.y * c + s0.vy / n * s;
    s1.vx = 6.0 * s0.z * n * (1.0 - c) + s0.vx * (4.0 * c - 3.0) + 2.0 * s0.vz * s;
    s1.vz = 3.0 * s0.z * n * s - 2.0 * s0.vx * s + s0.vz * c;
    s1.vy = -s0.y * n * s + s0.vy * c;
    return s1;
}

}  // namespace cw
