#pragma once

#include <vector>

#include "prohoi/occupancy.hpp"
#include "prohoi/se3.hpp"

namespace prohoi {

struct PlanarWaypoint {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;  // yaw, wrapped to (-pi, pi]
};

struct TrajectoryFrame {
    Pose pose;
    bool contact = false;
};

struct TimedTrajectory {
    double dt = 0.02;
    std::vector<TrajectoryFrame> frames;

    double time_of(std::size_t i) const { return static_cast<double>(i) * dt; }
    double duration() const { return frames.empty() ? 0.0 : time_of(frames.size() - 1); }

    // Pose at time t by interpolation between neighboring frames (clamped).
    Pose sample(double t) const;
};

// Root-deviation goal encoding fed to the policy: position deviation in the
// current root frame, relative rotation as 6D encoding, desired contact.
struct GoalObservation {
    Vec3 delta_p = Vec3::Zero();
    Rot6d delta_r = encode_rot6d(Rotation::identity());
    bool contact = false;
};

struct VelocityLimits {
    double v_max = 0.4;      // m/s
    double omega_max = 1.0;  // rad/s
};

// 8-connected A* on the inflated grid followed by line-of-sight shortcutting.
// Waypoint yaws follow the tangent of the leaving segment; the final yaw is
// goal.psi. Throws InvalidEndpointError / UnreachableError.
std::vector<PlanarWaypoint> plan_path(const OccupancyMap& map, const PlanarWaypoint& start,
                                      const PlanarWaypoint& goal, double inflation_radius);

// [x, y, psi] -> pose at (x, y, h_stand) with pure-yaw rotation.
std::vector<Pose> lift_waypoints(const std::vector<PlanarWaypoint>& path, double h_stand);

// Via-point sequence
//   [curr, target_up, target, target_up, nav..., end_up, end, end_up]
// where X_up replaces the z coordinate with h_stand. Contact is true from the
// target entry through the end entry inclusive.
std::vector<TrajectoryFrame> build_sequence(const Pose& current, const Pose& target,
                                            const Pose& end, const std::vector<Pose>& nav_waypoints,
                                            double h_stand);

// Time-parameterize the waypoints. Each segment takes
//   ceil(max(|dp|/v_max, dtheta/omega_max) / dt) * dt
// and is sampled uniformly, so per-frame motion respects both limits.
// Frame contact flags copy the destination waypoint of their segment.
TimedTrajectory interpolate_trajectory(const std::vector<TrajectoryFrame>& waypoints,
                                       const VelocityLimits& limits, double dt);

GoalObservation goal_observation(const Pose& current_root, const TrajectoryFrame& reference);

}  // namespace prohoi
