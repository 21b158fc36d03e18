#include "rvsim/disturbances.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace rvsim;

TEST(Drag, AppendixValue) {
    const Vec3 f = drag_force(OrbitParams{}, BodyProperties{}, DisturbanceConfig{});
    EXPECT_NEAR(f.norm(), 9.18e-5, 0.01 * 9.18e-5);
    EXPECT_LT(f.x(), 0.0);
    EXPECT_EQ(f.y(), 0.0);
    EXPECT_EQ(f.z(), 0.0);
}

TEST(Drag, ZeroDensity) {
    DisturbanceConfig cfg;
    cfg.air_density = 0.0;
    EXPECT_TRUE(drag_force(OrbitParams{}, BodyProperties{}, cfg).isZero(0.0));
}

TEST(Drag, QuadraticInSpeed) {
    OrbitParams o1;
    OrbitParams o2 = o1;
    o2.mu *= 4.0;  // doubles the orbital speed at the same radius
    const double f1 = drag_force(o1, BodyProperties{}, DisturbanceConfig{}).norm();
    const double f2 = drag_force(o2, BodyProperties{}, DisturbanceConfig{}).norm();
    EXPECT_NEAR(f2 / f1, 4.0, 1e-12);
}

TEST(J2, Coefficient) {
    EXPECT_NEAR(j2_coefficient(600.0, OrbitParams{}), 7.06e-3, 0.01 * 7.06e-3);
}

TEST(J2, EquatorialHasNoLateralComponents) {
    const OrbitParams orbit;
    for (double t : {0.0, 100.0, 1234.5}) {
        const Vec3 f = j2_force_formula(600.0, orbit, 0.0, t);
        EXPECT_NEAR(f.x(), -j2_coefficient(600.0, orbit), 1e-18);
        EXPECT_EQ(f.y(), 0.0);
        EXPECT_EQ(f.z(), 0.0);
    }
}

TEST(J2, RandomBoundedAndReproducible) {
    DisturbanceConfig cfg;
    DisturbanceModel a(cfg, 42), b(cfg, 42), c(cfg, 43);
    const SpacecraftState s;
    bool differs = false;
    for (int k = 0; k < 5000; ++k) {
        const double t = 0.01 * k;
        const Vec3 fa = a.j2_force(s, OrbitParams{}, t);
        EXPECT_LE(fa.cwiseAbs().maxCoeff(), 1e-3);
        EXPECT_EQ(fa, b.j2_force(s, OrbitParams{}, t));
        if (fa != c.j2_force(s, OrbitParams{}, t)) differs = true;
    }
    EXPECT_TRUE(differs);
}

TEST(J2, HeldBetweenDraws) {
    DisturbanceModel m(DisturbanceConfig{}, 1);
    const SpacecraftState s;
    const Vec3 first = m.j2_force(s, OrbitParams{}, 0.0);
    EXPECT_EQ(m.j2_force(s, OrbitParams{}, 0.99), first);
    EXPECT_NE(m.j2_force(s, OrbitParams{}, 1.0), first);
}

TEST(Solar, Pressure) {
    EXPECT_NEAR(solar_pressure(DisturbanceConfig{}), 4.567e-6, 1e-9);
}

TEST(Solar, ForceAtFullReflectivity) {
    EXPECT_NEAR(solar_force(BodyProperties{}, DisturbanceConfig{}).norm(), 1.315e-5, 0.01 * 1.315e-5);
}

TEST(Solar, ZeroReflectivityHalves) {
    BodyProperties k0;
    k0.reflectivity = 0.0;
    const double full = solar_force(BodyProperties{}, DisturbanceConfig{}).norm();
    EXPECT_NEAR(solar_force(k0, DisturbanceConfig{}).norm(), 0.5 * full, 1e-18);
}

TEST(Solar, TorqueCases) {
    DisturbanceConfig cfg;
    cfg.pressure_offset = Vec3::Zero();
    EXPECT_TRUE(solar_torque(BodyProperties{}, cfg).isZero(0.0));

    cfg.pressure_offset = cfg.sun_direction;
    EXPECT_LE(solar_torque(BodyProperties{}, cfg).norm(), 1e-20);

    cfg.sun_direction = Vec3::UnitX();
    cfg.pressure_offset = Vec3::UnitY();
    const double f = solar_force(BodyProperties{}, cfg).norm();
    EXPECT_NEAR(solar_torque(BodyProperties{}, cfg).norm(), f, 1e-20);
    EXPECT_NEAR(f, 1.3e-5, 0.02e-5);
}

TEST(GravityGradient, PrincipalAxisGivesZero) {
    BodyProperties props;
    props.inertia = {144, 160, 200};
    EXPECT_TRUE(gravity_gradient_torque(Vec3::UnitZ(), OrbitParams{}, props).isZero(0.0));
    EXPECT_TRUE(gravity_gradient_torque(SpacecraftState{}, OrbitParams{}, props).isZero(0.0));
}

TEST(GravityGradient, FortyFiveDegrees) {
    BodyProperties props;
    props.inertia = {144, 144, 200};
    const OrbitParams orbit;
    const Vec3 r = Vec3(1, 0, 1).normalized();
    const double n2 = orbit.rate() * orbit.rate();
    EXPECT_NEAR(n2, 1.2255e-6, 1e-9);
    const double expected = 3.0 * n2 * (200.0 - 144.0) * 0.5;
    EXPECT_NEAR(gravity_gradient_torque(r, orbit, props).norm(), expected, 1e-12);
    EXPECT_NEAR(expected, 1.029e-4, 1e-7);

    BodyProperties sym;
    EXPECT_LE(gravity_gradient_torque(r, orbit, sym).norm(), 1e-18);
}

TEST(GravityGradient, LinearInRateSquared) {
    BodyProperties props;
    props.inertia = {144, 150, 200};
    OrbitParams o1;
    OrbitParams o2 = o1;
    o2.mu *= 2.0;
    const Vec3 r = Vec3(1, 2, 3).normalized();
    EXPECT_NEAR(gravity_gradient_torque(r, o2, props).norm() / gravity_gradient_torque(r, o1, props).norm(), 2.0,
                1e-12);
}

namespace {

DisturbanceConfig none() {
    DisturbanceConfig c;
    c.drag = c.j2 = c.solar_force = c.solar_torque = c.gravity_gradient = c.bias_torque = false;
    return c;
}

}  // namespace

TEST(Total, AllDisabled) {
    DisturbanceModel m(none(), 1);
    const ExternalLoads l = m.total(SpacecraftState{}, OrbitParams{}, BodyProperties{}, 0.0);
    EXPECT_TRUE(l.force_lvlh.isZero(0.0));
    EXPECT_TRUE(l.torque_body.isZero(0.0));
}

TEST(Total, DragOnly) {
    DisturbanceConfig cfg = none();
    cfg.drag = true;
    DisturbanceModel m(cfg, 1);
    const ExternalLoads l = m.total(SpacecraftState{}, OrbitParams{}, BodyProperties{}, 0.0);
    EXPECT_EQ(l.force_lvlh, drag_force(OrbitParams{}, BodyProperties{}, cfg));
    EXPECT_TRUE(l.torque_body.isZero(0.0));
}

TEST(Total, DefaultsWithinBand) {
    DisturbanceModel m(DisturbanceConfig{}, 3);
    for (int k = 0; k < 200; ++k) {
        const double f = m.total(SpacecraftState{}, OrbitParams{}, BodyProperties{}, k * 0.5).force_lvlh.norm();
        EXPECT_GE(f, 9e-5);
        EXPECT_LE(f, 3e-3);
    }
}

TEST(Total, IsSumOfTerms) {
    const DisturbanceConfig cfg;
    SpacecraftState s;
    s.attitude = Quaternion(Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()));
    const OrbitParams orbit;
    const BodyProperties props;
    DisturbanceModel m(cfg, 9), j2_only(cfg, 9);
    const ExternalLoads l = m.total(s, orbit, props, 12.0);
    const Vec3 f = drag_force(orbit, props, cfg) + j2_only.j2_force(s, orbit, 12.0) + solar_force(props, cfg);
    const Vec3 tq = solar_torque(props, cfg, s.attitude) + gravity_gradient_torque(s, orbit, props) + cfg.torque_bias;
    EXPECT_EQ(l.force_lvlh, f);
    EXPECT_EQ(l.torque_body, tq);
}
