#include "apf_samples.hpp"
#include "rvsim/guidance.hpp"

#include <gtest/gtest.h>

#include <array>
#include <random>

using namespace rvsim;

namespace {

RepulsiveParams params() {
    return {1e8, 300.0, braking_accel(3.0, 0.5, 600.0)};
}

using apf::Sample;
using apf::activation_sample;

}  // namespace

TEST(Attractive, Examples) {
    EXPECT_EQ(attractive_force(Vec3::Zero(), {1, 2, 3}, 1.0), Vec3(1, 2, 3));
    EXPECT_EQ(attractive_force({4, 5, 6}, {4, 5, 6}, 1.0), Vec3::Zero());
    EXPECT_EQ(attractive_force({200, 0, 0}, Vec3::Zero(), 0.5), Vec3(-100, 0, 0));
}

TEST(DynamicRadius, Examples) {
    const double a = braking_accel(3.0, 0.5, 600.0);
    EXPECT_NEAR(a, 2.946e-3, 1e-6);
    EXPECT_EQ(dynamic_radius(0.0, 300.0, a), 300.0);
    EXPECT_NEAR(dynamic_radius(1.0, 300.0, 2.946e-3), 469.7, 0.05);
    EXPECT_THROW(dynamic_radius(1.0, 300.0, 0.0), std::invalid_argument);
}

TEST(Repulsive, OutsideInfluenceIsZero) {
    const RepulsiveForce f = repulsive_force(Vec3::Zero(), {1, 0, 0}, {400, 0, 0}, Vec3::Zero(), params());
    EXPECT_FALSE(f.active());
}

TEST(Repulsive, RecedingIsZero) {
    const RepulsiveForce f = repulsive_force(Vec3::Zero(), {-1, 0, 0}, {100, 0, 0}, Vec3::Zero(), params());
    EXPECT_FALSE(f.active());
}

TEST(Repulsive, HeadOnHasNoSteering) {
    const RepulsiveForce f = repulsive_force(Vec3::Zero(), {0.5, 0, 0}, {100, 0, 0}, {-0.1, 0, 0}, params());
    ASSERT_TRUE(f.active());
    EXPECT_EQ(f.steering, Vec3::Zero());
    EXPECT_LT(f.radial.x(), 0.0);
    EXPECT_EQ(f.radial.y(), 0.0);
    EXPECT_EQ(f.radial.z(), 0.0);
}

TEST(Repulsive, ZeroOutsideActivationSet) {
    std::mt19937_64 rng(11);
    const RepulsiveParams p = params();
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const Sample s = apf::any_sample(rng);
        const RepulsiveForce f = repulsive_force(s.x, s.v, s.obs, s.obs_v, p);
        if (!apf::in_activation_set(s, p.influence)) {
            ++checked;
            EXPECT_EQ(f.radial, Vec3::Zero());
            EXPECT_EQ(f.steering, Vec3::Zero());
            EXPECT_EQ(repulsive_potential(s.x, s.v, s.obs, s.obs_v, p), 0.0);
        } else {
            EXPECT_TRUE(f.active());
        }
    }
    EXPECT_GT(checked, 5000);
}

TEST(Repulsive, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    const RepulsiveParams p = params();
    double worst_x = 0.0, worst_v = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const apf::GradientCheck c = apf::check_gradient(activation_sample(rng), p);
        worst_x = std::max(worst_x, c.position);
        worst_v = std::max(worst_v, c.velocity);
    }
    EXPECT_LE(worst_x, 1e-6);
    EXPECT_LE(worst_v, 1e-6);
}

TEST(Repulsive, DecompositionIsOrthogonal) {
    std::mt19937_64 rng(13);
    const RepulsiveParams p = params();
    for (int i = 0; i < 1000; ++i) {
        const Sample s = activation_sample(rng);
        const RepulsiveForce f = repulsive_force(s.x, s.v, s.obs, s.obs_v, p);
        const RepulsiveGradient g = repulsive_gradient(s.x, s.v, s.obs, s.obs_v, p);
        EXPECT_LE(std::abs(f.radial.dot(f.steering)), 1e-12 * f.total().squaredNorm());
        EXPECT_LE((f.total() + g.position + g.velocity).norm(), 1e-12 * f.total().norm());
        EXPECT_LE(f.radial.cross(s.obs - s.x).norm(), 1e-9 * f.radial.norm() * (s.obs - s.x).norm());
    }
}

TEST(Repulsive, UndetectedTrackGivesNothing) {
    ObstacleTrack tr;
    tr.position = {50, 0, 0};
    tr.detected = false;
    EXPECT_FALSE(repulsive_force(Vec3::Zero(), {1, 0, 0}, tr, params()).active());
}

TEST(Field, Summation) {
    const Vec3 fa(1, 2, 3);
    EXPECT_EQ(total_field(fa, {}), fa);
    const std::array<RepulsiveForce, 2> r{RepulsiveForce{{1, 0, 0}, {0, 1, 0}},
                                          RepulsiveForce{{0, 0, -2}, {0.5, 0, 0}}};
    EXPECT_EQ(total_field(fa, r), Vec3(2.5, 3, 1));
    const std::array<RepulsiveForce, 1> cancel{RepulsiveForce{-fa, Vec3::Zero()}};
    EXPECT_EQ(total_field(fa, cancel), Vec3::Zero());
}

TEST(DesiredVelocity, Examples) {
    const Vec3 prev(0.1, 0.2, 0.3);
    const Vec3 v = desired_velocity({3, 4, 0}, 1.0, prev);
    EXPECT_NEAR((v - Vec3(0.6, 0.8, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(desired_velocity(Vec3::Zero(), 1.0, prev), prev);
}

TEST(DesiredVelocity, MagnitudeIsMaxSpeed) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 f(g(rng), g(rng), g(rng));
        EXPECT_NEAR(desired_velocity(f * 1e3, 0.4, Vec3::Zero()).norm(), 0.4, 1e-15);
    }
}

TEST(Guidance, StallKeepsPreviousCommand) {
    ApfGains gains;
    gains.max_speed = 0.5;
    ApfGuidance g(gains);
    const auto first = g.update(Vec3::Zero(), Vec3::Zero(), 600.0, {100, 0, 0}, {}, 300.0);
    EXPECT_EQ(first.desired_velocity, Vec3(0.5, 0, 0));
    const auto stalled = g.update({100, 0, 0}, Vec3::Zero(), 600.0, {100, 0, 0}, {}, 300.0);
    EXPECT_TRUE(stalled.stalled);
    EXPECT_EQ(stalled.desired_velocity, first.desired_velocity);
}

TEST(Guidance, LateralWeight) {
    ApfGains gains;
    gains.lateral_weight = 2.0;
    ApfGuidance g(gains);
    const auto cmd = g.update(Vec3::Zero(), Vec3::Zero(), 600.0, {10, 1, -1}, {}, 300.0);
    EXPECT_EQ(cmd.attractive, Vec3(10, 2, -2));
}
