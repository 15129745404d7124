#pragma once

#include <optional>
#include <vector>

#include "prohoi/se3.hpp"

namespace prohoi {

// One timestep of a logged episode stream.
struct StateFrame {
    double t = 0.0;
    Pose root_pose;        // robot base in world
    Pose object_pose_rel;  // object in robot base frame
    bool contact_cmd = false;
    std::optional<bool> hand_contact;
};

// Rectangular prism in the robot base frame inside which a commanded-contact
// object is considered held.
struct SafetyRegion {
    Vec3 center{0.35, 0.0, 0.0};
    Vec3 half_extents{0.2, 0.1, 0.2};

    bool contains(const Vec3& p) const {
        return ((p - center).cwiseAbs().array() <= half_extents.array()).all();
    }
};

enum class MonitorStatus { Nominal, DropAlert };

// Sliding-window drop detector. Alerts once contact is commanded while the
// object sits outside the safety prism for window_n consecutive frames; a
// single in-region (or contact-off) frame resets the count. The alert latches
// until reset().
class DropMonitor {
public:
    DropMonitor(SafetyRegion region, int window_n) : region_(region), window_n_(window_n) {}

    MonitorStatus update(const StateFrame& frame);
    void reset();

    MonitorStatus status() const { return alerted_ ? MonitorStatus::DropAlert : MonitorStatus::Nominal; }
    int consecutive_violations() const { return violations_; }
    // History retained for release-velocity estimation (last frames fed in).
    const std::vector<StateFrame>& history() const { return history_; }

private:
    SafetyRegion region_;
    int window_n_;
    int violations_ = 0;
    bool alerted_ = false;
    bool has_last_t_ = false;
    double last_t_ = 0.0;
    std::vector<StateFrame> history_;
    static constexpr std::size_t kHistoryCap = 32;
};

struct VelocityEstimate {
    Vec3 linear = Vec3::Zero();   // m/s, world frame
    Vec3 angular = Vec3::Zero();  // rad/s, world frame
};

// Finite-difference world-frame velocities from the last frames of the
// stream, averaged over the final 3 samples (needs >= 4 poses).
VelocityEstimate estimate_release_velocity(const std::vector<StateFrame>& history,
                                           const Pose& robot_world_pose);

struct GazeResult {
    Pose pose;
    bool degenerate_bearing = false;  // object on top of the robot; yaw kept
};

// Root pose that faces the predicted object position: yaw along the bearing,
// planar position on the object-to-robot ray at the standoff distance,
// height h_stand.
GazeResult gaze_adjustment(const Pose& robot, const Vec3& predicted_object_position,
                           double camera_fov_h, double standoff, double h_stand);

}  // namespace prohoi
