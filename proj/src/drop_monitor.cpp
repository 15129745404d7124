#include "prohoi/drop_monitor.hpp"

#include <array>
#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

MonitorStatus DropMonitor::update(const StateFrame& frame) {
    if (window_n_ <= 0) throw ConfigError("monitor window must be positive");
    if (has_last_t_ && frame.t <= last_t_)
        throw StreamError("out-of-order timestamp in state stream");
    last_t_ = frame.t;
    has_last_t_ = true;

    history_.push_back(frame);
    if (history_.size() > kHistoryCap) history_.erase(history_.begin());

    bool violating = frame.contact_cmd && !region_.contains(frame.object_pose_rel.position);
    violations_ = violating ? violations_ + 1 : 0;
    if (violations_ >= window_n_) alerted_ = true;
    return status();
}

void DropMonitor::reset() {
    violations_ = 0;
    alerted_ = false;
    history_.clear();
}

VelocityEstimate estimate_release_velocity(const std::vector<StateFrame>& history,
                                           const Pose& robot_world_pose) {
    if (history.size() < 4)
        throw InsufficientHistoryError("need at least 4 frames for 3 velocity samples");

    // world object poses of the last 4 frames
    std::array<Pose, 4> poses;
    std::array<double, 4> times;
    for (int i = 0; i < 4; ++i) {
        const StateFrame& f = history[history.size() - 4 + i];
        poses[i] = robot_world_pose * f.object_pose_rel;
        times[i] = f.t;
    }

    VelocityEstimate est;
    for (int i = 0; i < 3; ++i) {
        double dt = times[i + 1] - times[i];
        if (dt <= 0.0) throw StreamError("non-increasing timestamps in velocity history");
        est.linear += (poses[i + 1].position - poses[i].position) / dt;
        // world angular velocity: log(R_next * R_prev^-1) / dt
        est.angular += log_map(poses[i + 1].rotation * poses[i].rotation.inverse()) / dt;
    }
    est.linear /= 3.0;
    est.angular /= 3.0;
    return est;
}

GazeResult gaze_adjustment(const Pose& robot, const Vec3& predicted_object_position,
                           double camera_fov_h, double standoff, double h_stand) {
    if (!predicted_object_position.allFinite())
        throw DomainError("predicted object position is not finite");
    if (camera_fov_h <= 0.0 || standoff <= 0.0)
        throw ConfigError("fov and standoff must be positive");

    GazeResult out;
    Eigen::Vector2d offset = predicted_object_position.head<2>() - robot.position.head<2>();
    if (offset.norm() < 0.01) {
        out.degenerate_bearing = true;
        out.pose = robot;
        out.pose.position.z() = h_stand;
        out.pose.rotation = yaw_only(robot.rotation);
        return out;
    }
    double bearing = std::atan2(offset.y(), offset.x());
    out.pose.rotation = Rotation::from_yaw(bearing);
    out.pose.position =
        Vec3(predicted_object_position.x() - standoff * std::cos(bearing),
             predicted_object_position.y() - standoff * std::sin(bearing), h_stand);
    return out;
}

}  // namespace prohoi
