#include "cw_oracle.hpp"
#include "rvsim/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rvsim;

namespace {

SpacecraftState at(const Vec3& pos, const Vec3& vel) {
    SpacecraftState s;
    s.position = pos;
    s.velocity = vel;
    return s;
}

}  // namespace

TEST(Hill, EquilibriumAtOrigin) {
    EXPECT_EQ(hill_accel(SpacecraftState{}, Vec3::Zero(), OrbitParams{}), Vec3::Zero());
}

TEST(Hill, RadialOffset) {
    const OrbitParams orbit;
    const double w = orbit.rate();
    const Vec3 a = hill_accel(at({0, 0, 100}, Vec3::Zero()), Vec3::Zero(), orbit);
    EXPECT_NEAR(a.z(), 3.0 * w * w * 100.0, 1e-15);
    EXPECT_NEAR(a.z(), 3.676e-4, 1e-6);
    EXPECT_EQ(a.x(), 0.0);
    EXPECT_EQ(a.y(), 0.0);
}

TEST(Hill, CoriolisFromAlongTrackSpeed) {
    const OrbitParams orbit;
    const Vec3 a = hill_accel(at(Vec3::Zero(), {1, 0, 0}), Vec3::Zero(), orbit);
    EXPECT_NEAR(a.z(), -2.0 * orbit.rate(), 1e-18);
    EXPECT_NEAR(a.z(), -2.214e-3, 1e-6);
}

TEST(Hill, LinearInForce) {
    const OrbitParams orbit;
    const SpacecraftState s = at({10, -3, 40}, {0.2, 0.1, -0.05});
    const Vec3 f1(1, 2, -1), f2(-0.5, 0.25, 3);
    const Vec3 a0 = hill_accel(s, Vec3::Zero(), orbit);
    const Vec3 lhs = hill_accel(s, 2.0 * f1 + 3.0 * f2, orbit) - a0;
    const Vec3 rhs = 2.0 * (hill_accel(s, f1, orbit) - a0) + 3.0 * (hill_accel(s, f2, orbit) - a0);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hill, RejectsNonFiniteForce) {
    EXPECT_THROW(hill_accel(SpacecraftState{}, Vec3(NAN, 0, 0), OrbitParams{}), std::invalid_argument);
}

TEST(Attitude, AtRest) {
    const AttitudeRates r = attitude_derivatives(SpacecraftState{}, Vec3::Zero(), BodyProperties{});
    EXPECT_TRUE(r.attitude_dot.isZero(0.0));
    EXPECT_TRUE(r.rate_dot.isZero(0.0));
}

TEST(Attitude, SymmetricSpinHasNoGyroscopicTerm) {
    SpacecraftState s;
    s.rate = {0.1, 0, 0};
    EXPECT_TRUE(attitude_derivatives(s, Vec3::Zero(), BodyProperties{}).rate_dot.isZero(0.0));
}

TEST(Attitude, TorqueOverInertia) {
    const AttitudeRates r = attitude_derivatives(SpacecraftState{}, {1e-3, 0, 0}, BodyProperties{});
    EXPECT_NEAR(r.rate_dot.x(), 6.944e-6, 1e-9);
    EXPECT_EQ(r.rate_dot.y(), 0.0);
}

TEST(MassFlow, Values) {
    const BodyProperties props;
    EXPECT_EQ(mass_flow(Vec3::Zero(), props), 0.0);
    EXPECT_NEAR(mass_flow(Vec3(3, 0, 0), props), 3.0 / (9.80665 * 220.0), 1e-18);
    EXPECT_NEAR(mass_flow(Vec3(3, 0, 0), props), 1.3905e-3, 1e-7);
    EXPECT_EQ(mass_flow(Vec3(1, -1, 1), props), mass_flow(Vec3(3, 0, 0), props));
    EXPECT_EQ(mass_flow(3.0, props), mass_flow(Vec3(3, 0, 0), props));
}

TEST(Step, CoastAtOriginStaysPut) {
    const SpacecraftState s0;
    const SpacecraftState s1 = step(s0, Vec3::Zero(), Vec3::Zero(), {}, OrbitParams{}, BodyProperties{}, 0.05);
    EXPECT_LE((s1.position - s0.position).norm(), 1e-15);
    EXPECT_LE((s1.velocity - s0.velocity).norm(), 1e-15);
    EXPECT_EQ(s1.mass, s0.mass);
}

TEST(Step, CoastMatchesClosedForm) {
    const OrbitParams orbit;
    const BodyProperties props;
    const double n = orbit.rate();
    const double dt = 0.05;
    const cw::State c0{100.0, 5.0, 50.0, 0.1, -0.01, 0.0};
    SpacecraftState s = at({c0.x, c0.y, c0.z}, {c0.vx, c0.vy, c0.vz});
    const auto steps = static_cast<long>(std::ceil(orbit.period() / dt));
    double worst = 0.0;
    for (long k = 1; k <= steps; ++k) {
        s = step(s, Vec3::Zero(), Vec3::Zero(), {}, orbit, props, dt);
        if (k % 50 == 0 || k == steps) {
            const cw::State c = cw::propagate(c0, n, static_cast<double>(k) * dt);
            worst = std::max(worst, (s.position - Vec3(c.x, c.y, c.z)).norm());
        }
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(Step, ConstantThrustMassDrop) {
    const BodyProperties props;
    SpacecraftState s;
    const double m0 = s.mass;
    for (int k = 0; k < 100; ++k) s = step(s, Vec3(3, 0, 0), Vec3::Zero(), {}, OrbitParams{}, props, 0.1);
    EXPECT_NEAR(m0 - s.mass, 10.0 * 3.0 / (9.80665 * 220.0), 1e-6);
}

TEST(Step, QuaternionNormAndMassMonotone) {
    const OrbitParams orbit;
    const BodyProperties props;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpacecraftState s;
    s.rate = {0.01, -0.02, 0.015};
    for (int k = 0; k < 5000; ++k) {
        const bool firing = k % 7 < 3;
        const Vec3 f = firing ? Vec3(u(rng), u(rng), u(rng)) : Vec3::Zero();
        const double before = s.mass;
        s = step(s, f, Vec3(u(rng), u(rng), u(rng)) * 1e-3, {}, orbit, props, 0.01);
        EXPECT_NEAR(s.attitude.norm(), 1.0, 1e-9);
        if (firing) {
            EXPECT_LE(s.mass, before);
        } else {
            EXPECT_EQ(s.mass, before);
        }
    }
}

TEST(Step, ThrowsAtDryMass) {
    BodyProperties props;
    SpacecraftState s;
    s.mass = props.dry_mass + 1e-6;
    EXPECT_THROW(step(s, Vec3(3, 0, 0), Vec3::Zero(), {}, OrbitParams{}, props, 1.0), PropellantExhausted);
}

TEST(Step, RejectsNonPositiveDt) {
    EXPECT_THROW(step(SpacecraftState{}, Vec3::Zero(), Vec3::Zero(), {}, OrbitParams{}, BodyProperties{}, 0.0),
                 std::invalid_argument);
}

TEST(Body, HalfDiagonal) {
    EXPECT_NEAR(BodyProperties{}.half_diagonal(), 1.04, 1e-3);
}
