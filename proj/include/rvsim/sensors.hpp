#pragma once

// Range-gated LIDAR obstacle detector with finite-difference velocity
// estimation. Guidance only ever sees ObstacleTrack values produced here.

#include "rvsim/frames.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace rvsim {

struct Waypoint {
    double time = 0.0;       // s
    Vec3 position = Vec3::Zero();

    bool operator==(const Waypoint&) const = default;
};

/// Ground-truth obstacle motion: constant velocity from `position` at t = 0,
/// or piecewise-linear through `waypoints` (held at the end points).
struct Obstacle {
    Vec3 position = Vec3::Zero();  // m, LVLH at t = 0
    Vec3 velocity = Vec3::Zero();  // m/s
    double radius = 1.0;           // m
    std::vector<Waypoint> waypoints;

    [[nodiscard]] Vec3 position_at(double t) const {
        if (waypoints.empty()) return position + t * velocity;
        if (t <= waypoints.front().time) return waypoints.front().position;
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            const Waypoint& a = waypoints[i - 1];
            const Waypoint& b = waypoints[i];
            if (t <= b.time) {
                const double s = (t - a.time) / (b.time - a.time);
                return a.position + s * (b.position - a.position);
            }
        }
        return waypoints.back().position;
    }

    [[nodiscard]] Vec3 velocity_at(double t) const {
        if (waypoints.empty()) return velocity;
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            const Waypoint& a = waypoints[i - 1];
            const Waypoint& b = waypoints[i];
            if (t >= a.time && t < b.time) return (b.position - a.position) / (b.time - a.time);
        }
        return Vec3::Zero();
    }

    bool operator==(const Obstacle&) const = default;
};

struct ObstacleTrack {
    std::size_t id = 0;
    Vec3 position = Vec3::Zero();   // last sampled position
    Vec3 velocity = Vec3::Zero();   // finite-difference estimate
    double radius = 0.0;
    double last_sample_time = 0.0;
    int samples = 0;                // since (re)acquisition
    bool detected = false;

    [[nodiscard]] bool has_velocity() const { return samples >= 2; }
};

/// Indices of the obstacles whose true distance from the chaser is within
/// `range` at time t.
inline std::vector<std::size_t> detect(const Vec3& chaser_pos, const std::vector<Obstacle>& obstacles,
                                       double range, double t = 0.0) {
    if (!(range > 0.0)) throw std::invalid_argument("detect: range must be positive");
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if ((obstacles[i].position_at(t) - chaser_pos).norm() <= range) hits.push_back(i);
    }
    return hits;
}

/// (new_pos - last_pos) / (t - t_last); zero for the first sample.
inline Vec3 estimate_velocity(const ObstacleTrack& track, const Vec3& new_pos, double t) {
    if (track.samples == 0) return Vec3::Zero();
    if (!(t > track.last_sample_time)) {
        throw std::invalid_argument("estimate_velocity: sample times must increase");
    }
    return (new_pos - track.position) / (t - track.last_sample_time);
}

struct SensorConfig {
    double range = 300.0;        // m
    double period = 1.0;         // s
    double noise_bound = 0.0;    // m, uniform per-axis position noise

    bool operator==(const SensorConfig&) const = default;
};

/// Track store for one run. Tracks are updated only when sample() is called,
/// which the harness does once per sensor period.
class LidarSensor {
public:
    LidarSensor(SensorConfig cfg, std::size_t obstacle_count, std::uint64_t seed)
        : cfg_(cfg), tracks_(obstacle_count), rng_(seed) {
        for (std::size_t i = 0; i < tracks_.size(); ++i) tracks_[i].id = i;
    }

    void sample(double t, const Vec3& chaser_pos, const std::vector<Obstacle>& obstacles) {
        std::vector<bool> in_range(tracks_.size(), false);
        for (std::size_t i : detect(chaser_pos, obstacles, cfg_.range, t)) in_range[i] = true;

        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            ObstacleTrack& tr = tracks_[i];
            if (!in_range[i]) {
                tr.detected = false;
                tr.samples = 0;
                continue;
            }
            Vec3 measured = obstacles[i].position_at(t);
            if (cfg_.noise_bound > 0.0) {
                std::uniform_real_distribution<double> u(-cfg_.noise_bound, cfg_.noise_bound);
                measured += Vec3(u(rng_), u(rng_), u(rng_));
            }
            tr.velocity = estimate_velocity(tr, measured, t);
            tr.position = measured;
            tr.radius = obstacles[i].radius;
            tr.last_sample_time = t;
            tr.samples += 1;
            tr.detected = true;
        }
    }

    [[nodiscard]] const std::vector<ObstacleTrack>& tracks() const { return tracks_; }
    [[nodiscard]] const SensorConfig& config() const { return cfg_; }

private:
    SensorConfig cfg_;
    std::vector<ObstacleTrack> tracks_;
    std::mt19937_64 rng_;
};

}  // namespace rvsim
