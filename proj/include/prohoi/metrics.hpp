#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "prohoi/planner.hpp"
#include "prohoi/se3.hpp"

namespace prohoi {

struct EpisodeFrame {
    Pose root_pose;
    Pose object_pose;  // world
    bool contact_cmd = false;
    bool hand_contact = false;
};

struct Episode {
    double dt = 0.02;
    std::vector<EpisodeFrame> frames;
    Vec3 goal_position = Vec3::Zero();
    std::optional<TimedTrajectory> reference;
};

// One side of the tracking-reward comparison. Body arrays are flattened and
// may be empty as long as both sides agree.
struct RewardState {
    Vec3 root_pos = Vec3::Zero();
    Rot6d root_rot = encode_rot6d(Rotation::identity());
    Eigen::VectorXd body_pos;
    Eigen::VectorXd body_rot;
    Eigen::VectorXd body_vel;
    Eigen::VectorXd body_angvel;
    Vec3 obj_pos = Vec3::Zero();
    // regularization inputs (current state only)
    bool joint_limit_violation = false;
    int undesired_contacts = 0;
    double action_rate_sq = 0.0;
};

struct RewardConfig {
    // exp(-err^2 / sigma) scales
    double sigma_rpos = 0.25;
    double sigma_rrot = 0.5;
    double sigma_bpos = 0.3;
    double sigma_brot = 0.5;
    double sigma_bvel = 1.0;
    double sigma_bang = 2.0;
    double sigma_opos = 0.3;
    // tracking weights
    double w_rpos = 0.5;
    double w_rrot = 0.5;
    double w_bpos = 1.0;
    double w_brot = 1.0;
    double w_bvel = 1.0;
    double w_bang = 1.0;
    double w_opos = 1.0;
    // regularization weights
    double w_joint_limits = -10.0;
    double w_undesired_contacts = -0.1;
    double w_action_rate = -0.3;
};

// Weighted exponential tracking terms plus regularization penalties.
double tracking_reward(const RewardState& state, const RewardState& ref, const RewardConfig& cfg);

// Some window of duration >= t_hold lifts the object h_lift above its initial
// height with hand contact throughout.
bool grasp_success(const Episode& ep, double h_lift = 0.1, double t_hold = 1.0);

// Distance from the final object position to the goal; planar by default.
double placement_precision(const Episode& ep, bool planar = true);

bool task_success(const Episode& ep, double tol = 0.1, double h_lift = 0.1, double t_hold = 1.0);

struct TrackingError {
    double rpe = 0.0;  // mean position error, m
    double roe = 0.0;  // mean geodesic orientation error, rad
};

// Executed trajectory resampled at the reference timestamps.
TrackingError rpe_roe(const TimedTrajectory& reference, const TimedTrajectory& executed);

struct PhaseLag {
    double mean_lag = 0.0;  // seconds
    std::size_t reached = 0;
    std::size_t unreached = 0;
};

// For every reference frame, the earliest later executed frame within radius
// of its position; frames never reached are excluded and counted.
PhaseLag motion_phase_lag(const TimedTrajectory& reference, const TimedTrajectory& executed,
                          double radius);

// Mean time offset between each reference 0->1 contact transition and the
// matching (k-th) actual hand-contact onset; negative when contact is early.
double contact_phase_lag(const TimedTrajectory& reference, const Episode& ep);

struct Scenario {
    Pose object_pose;
    Vec3 target_position = Vec3::Zero();
};

struct OodGridSpec {
    double x_min = 0.4;
    double x_max = 1.4;
    double spacing = 0.2;
    std::vector<double> yaw_set_deg = {0.0, 15.0, 30.0, 45.0};
    double target_radius = 4.0;
    double target_step_deg = 10.0;
};

struct OodGrid {
    std::vector<Scenario> scenarios;
    std::size_t grid_points = 0;
    std::size_t yaw_count = 0;
    std::size_t target_count = 0;
};

// Cartesian product of the trapezoid grid (x-major, then y), the yaw set, and
// the target circle, in that order. Deterministic.
OodGrid generate_ood_grid(const OodGridSpec& spec);

}  // namespace prohoi
