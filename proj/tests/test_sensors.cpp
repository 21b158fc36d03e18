#include "rvsim/sensors.hpp"

#include <gtest/gtest.h>

using namespace rvsim;

namespace {

Obstacle moving(const Vec3& p, const Vec3& v, double r = 10.0) {
    Obstacle o;
    o.position = p;
    o.velocity = v;
    o.radius = r;
    return o;
}

}  // namespace

TEST(Detect, RangeGate) {
    const std::vector<Obstacle> obs{moving({250, 0, 0}, Vec3::Zero()), moving({0, 350, 0}, Vec3::Zero())};
    const auto hits = detect(Vec3::Zero(), obs, 300.0);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0], 0u);
}

TEST(Detect, BoundaryCrossingFlipsOnce) {
    const std::vector<Obstacle> obs{moving({400, 0, 0}, {-1, 0, 0})};
    LidarSensor sensor(SensorConfig{}, 1, 1);
    int transitions = 0;
    bool was = false;
    for (int t = 0; t <= 200; ++t) {
        sensor.sample(t, Vec3::Zero(), obs);
        const bool now = sensor.tracks()[0].detected;
        if (now != was) ++transitions;
        if (now) {
            EXPECT_GE(t, 100);
        }
        was = now;
    }
    EXPECT_EQ(transitions, 1);
}

TEST(EstimateVelocity, UnitStep) {
    ObstacleTrack tr;
    tr.samples = 1;
    tr.position = Vec3::Zero();
    tr.last_sample_time = 0.0;
    EXPECT_EQ(estimate_velocity(tr, {1, 0, 0}, 1.0), Vec3(1, 0, 0));
    EXPECT_EQ(estimate_velocity(tr, Vec3::Zero(), 1.0), Vec3::Zero());
    EXPECT_THROW(estimate_velocity(tr, Vec3::Zero(), 0.0), std::invalid_argument);
}

TEST(EstimateVelocity, FirstSampleIsZero) {
    EXPECT_EQ(estimate_velocity(ObstacleTrack{}, {5, 5, 5}, 3.0), Vec3::Zero());
}

TEST(Lidar, ExactForConstantVelocityFromSecondSample) {
    const Vec3 v(0.25, -0.5, 0.125);
    const std::vector<Obstacle> obs{moving({100, 20, -30}, v)};
    LidarSensor sensor(SensorConfig{}, 1, 1);
    for (int t = 0; t < 20; ++t) {
        sensor.sample(t, Vec3::Zero(), obs);
        const ObstacleTrack& tr = sensor.tracks()[0];
        if (t == 0) {
            EXPECT_FALSE(tr.has_velocity());
        } else {
            EXPECT_EQ(tr.velocity, v);
        }
    }
}

TEST(Lidar, OutOfRangeObstacleIsInvisible) {
    const std::vector<Obstacle> obs{moving({0, 0, 301}, Vec3::Zero(), 50.0)};
    LidarSensor sensor(SensorConfig{}, 1, 1);
    sensor.sample(0.0, Vec3::Zero(), obs);
    EXPECT_FALSE(sensor.tracks()[0].detected);
    EXPECT_EQ(sensor.tracks()[0].position, Vec3::Zero());
}

TEST(Lidar, TrackResetsOnLoss) {
    Obstacle o;
    o.radius = 5.0;
    o.waypoints = {{0.0, {100, 0, 0}}, {10.0, {400, 0, 0}}, {20.0, {100, 0, 0}}};
    LidarSensor sensor(SensorConfig{}, 1, 1);
    for (int t = 0; t <= 20; ++t) sensor.sample(t, Vec3::Zero(), {o});
    EXPECT_TRUE(sensor.tracks()[0].detected);
    EXPECT_LT(sensor.tracks()[0].samples, 21);
}

TEST(Obstacle, WaypointInterpolation) {
    Obstacle o;
    o.waypoints = {{0.0, {0, 0, 0}}, {10.0, {10, 0, 0}}};
    EXPECT_EQ(o.position_at(-1.0), Vec3::Zero());
    EXPECT_EQ(o.position_at(5.0), Vec3(5, 0, 0));
    EXPECT_EQ(o.position_at(20.0), Vec3(10, 0, 0));
    EXPECT_EQ(o.velocity_at(5.0), Vec3(1, 0, 0));
    EXPECT_EQ(o.velocity_at(20.0), Vec3::Zero());
}
