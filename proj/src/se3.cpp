#include "prohoi/se3.hpp"

#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

Rotation Rotation::from_quaternion(const Quat& q) { return Rotation(q); }

Rotation Rotation::from_matrix(const Mat3& m) { return Rotation(Quat(m)); }

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
    return Rotation(Quat(Eigen::AngleAxisd(angle, axis.normalized())));
}

Rotation Rotation::from_yaw(double yaw) {
    return Rotation(Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));
}

Rotation Rotation::operator*(const Rotation& rhs) const {
    return Rotation(q_ * rhs.q_);
}

Rotation Rotation::inverse() const { return Rotation(q_.conjugate()); }

double angular_distance(const Rotation& a, const Rotation& b) {
    double d = std::abs(a.quaternion().dot(b.quaternion()));
    d = std::min(d, 1.0);
    return 2.0 * std::acos(d);
}

Rotation slerp(const Rotation& a, const Rotation& b, double s) {
    Quat qa = a.quaternion();
    Quat qb = b.quaternion();
    if (qa.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
    return Rotation::from_quaternion(qa.slerp(s, qb));
}

Pose interpolate_pose(const Pose& a, const Pose& b, double s) {
    if (s < 0.0 || s > 1.0) throw DomainError("interpolation parameter outside [0, 1]");
    if (s == 0.0) return a;
    if (s == 1.0) return b;
    return {(1.0 - s) * a.position + s * b.position, slerp(a.rotation, b.rotation, s)};
}

Pose relative_pose(const Pose& world_a, const Pose& world_b) {
    return world_a.inverse() * world_b;
}

double yaw_of(const Rotation& r, bool* degenerate) {
    Mat3 m = r.matrix();
    // Z-Y-X: pitch = -asin(R20); degenerate when |R20| -> 1.
    bool gimbal = std::abs(std::abs(m(2, 0)) - 1.0) < 1e-12 ||
                  std::hypot(m(0, 0), m(1, 0)) < 1e-6;
    if (degenerate) *degenerate = gimbal;
    if (gimbal) return std::atan2(-m(0, 1), m(1, 1));
    return std::atan2(m(1, 0), m(0, 0));
}

Rotation yaw_only(const Rotation& r, bool* degenerate) {
    return Rotation::from_yaw(yaw_of(r, degenerate));
}

Rot6d encode_rot6d(const Rotation& r) {
    Mat3 m = r.matrix();
    Rot6d v;
    v << m(0, 0), m(0, 1), m(1, 0), m(1, 1), m(2, 0), m(2, 1);
    return v;
}

Rotation decode_rot6d(const Rot6d& v) {
    Vec3 a(v[0], v[2], v[4]);
    Vec3 b(v[1], v[3], v[5]);
    double na = a.norm();
    if (na < 1e-12) throw DomainError("rot6d first column is degenerate");
    Vec3 c0 = a / na;
    Vec3 c1 = b - c0.dot(b) * c0;
    double n1 = c1.norm();
    if (n1 < 1e-12) throw DomainError("rot6d columns are linearly dependent");
    c1 /= n1;
    Mat3 m;
    m.col(0) = c0;
    m.col(1) = c1;
    m.col(2) = c0.cross(c1);
    return Rotation::from_matrix(m);
}

Vec3 log_map(const Rotation& r) {
    Eigen::AngleAxisd aa(r.quaternion());
    double angle = aa.angle();
    if (angle > M_PI) {
        angle -= 2.0 * M_PI;  // keep magnitude <= pi
    }
    return angle * aa.axis();
}

Rotation exp_map(const Vec3& w) {
    double angle = w.norm();
    if (angle < 1e-14) return Rotation::identity();
    return Rotation::from_axis_angle(w / angle, angle);
}

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

}  // namespace prohoi
