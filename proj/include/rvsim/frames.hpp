#pragma once

// Reference-frame mathematics: 3-2-1 Euler rotations, quaternions and
// body <-> LVLH transforms.
//
// LVLH axes: x along V-bar (orbital velocity), z along R-bar (toward the
// Earth centre), y along H-bar (opposite the orbital angular momentum).
// Quaternions are scalar-first unit quaternions describing the active
// rotation of body vectors into LVLH.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rvsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quaternion = Eigen::Quaterniond;

inline constexpr double kGimbalLockMargin = 1e-3;

/// Roll/pitch/yaw for the 3-2-1 (yaw, then pitch, then roll) sequence [rad].
struct EulerAngles321 {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    /// True when |pitch| is within kGimbalLockMargin of pi/2, where roll and
    /// yaw stop being separately observable.
    [[nodiscard]] bool near_gimbal_lock() const {
        return std::abs(pitch) > std::numbers::pi / 2.0 - kGimbalLockMargin;
    }
};

inline Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return r;
}

inline Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return r;
}

inline Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return r;
}

/// Body -> LVLH direction-cosine matrix R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 euler_to_dcm(const EulerAngles321& e) {
    return rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll);
}

inline Quaternion euler_to_quat(const EulerAngles321& e) {
    const Quaternion qz(Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()));
    const Quaternion qy(Eigen::AngleAxisd(e.pitch, Vec3::UnitY()));
    const Quaternion qx(Eigen::AngleAxisd(e.roll, Vec3::UnitX()));
    Quaternion q = qz * qy * qx;
    q.normalize();
    return q;
}

inline Mat3 quat_to_dcm(const Quaternion& q) { return q.toRotationMatrix(); }

/// Extracts 3-2-1 angles from a unit quaternion. Inside the gimbal-lock band
/// the result is still a valid decomposition; check near_gimbal_lock().
inline EulerAngles321 quat_to_euler(const Quaternion& q) {
    const Mat3 r = quat_to_dcm(q);
    EulerAngles321 e;
    e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    e.roll = std::atan2(r(2, 1), r(2, 2));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
    return e;
}

inline Vec3 rotate_body_to_lvlh(const Vec3& v_body, const Quaternion& q) {
    return q * v_body;
}

inline Vec3 rotate_lvlh_to_body(const Vec3& v_lvlh, const Quaternion& q) {
    return q.conjugate() * v_lvlh;
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace rvsim
