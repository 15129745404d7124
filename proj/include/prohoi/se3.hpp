#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace prohoi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// First two columns of the rotation matrix, stored row-major:
// [R00, R01, R10, R11, R20, R21].
using Rot6d = Eigen::Matrix<double, 6, 1>;

// SO(3) element kept as a unit quaternion; renormalized after composition.
class Rotation {
public:
    Rotation() : q_(Quat::Identity()) {}

    static Rotation identity() { return Rotation(); }
    static Rotation from_quaternion(const Quat& q);
    static Rotation from_matrix(const Mat3& m);
    static Rotation from_axis_angle(const Vec3& axis, double angle);
    static Rotation from_yaw(double yaw);

    const Quat& quaternion() const { return q_; }
    Mat3 matrix() const { return q_.toRotationMatrix(); }

    Rotation operator*(const Rotation& rhs) const;
    Vec3 operator*(const Vec3& v) const { return q_ * v; }
    Rotation inverse() const;

private:
    explicit Rotation(const Quat& q) : q_(q.normalized()) {}
    Quat q_;
};

// Rigid transform: x_world = rotation * x_local + position.
struct Pose {
    Vec3 position = Vec3::Zero();
    Rotation rotation;

    static Pose identity() { return {}; }

    Pose operator*(const Pose& rhs) const {
        return {position + rotation * rhs.position, rotation * rhs.rotation};
    }
    Pose inverse() const {
        Rotation rinv = rotation.inverse();
        return {-(rinv * position), rinv};
    }
    Vec3 apply(const Vec3& p) const { return rotation * p + position; }
};

// Geodesic distance on SO(3), in [0, pi].
double angular_distance(const Rotation& a, const Rotation& b);

// Shortest-arc slerp (quaternion negated when dot < 0).
Rotation slerp(const Rotation& a, const Rotation& b, double s);

// Linear position blend + shortest-arc rotation blend. s must be in [0, 1].
Pose interpolate_pose(const Pose& a, const Pose& b, double s);

// inverse(world_a) * world_b
Pose relative_pose(const Pose& world_a, const Pose& world_b);

// Z-Y-X Euler yaw. Near pitch = +/-pi/2 the decomposition degenerates;
// an atan2 fallback is used and *degenerate is set when provided.
double yaw_of(const Rotation& r, bool* degenerate = nullptr);

// Pure rotation about world z with the yaw of r; roll and pitch zero.
Rotation yaw_only(const Rotation& r, bool* degenerate = nullptr);

Rot6d encode_rot6d(const Rotation& r);

// Gram-Schmidt on the two encoded columns; valid for any 6-vector whose
// halves are linearly independent.
Rotation decode_rot6d(const Rot6d& v);

// Rotation vector (axis * angle) of r, angle in [0, pi].
Vec3 log_map(const Rotation& r);
Rotation exp_map(const Vec3& w);

// Wrap to (-pi, pi].
double normalize_angle(double a);

}  // namespace prohoi
