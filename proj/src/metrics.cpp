#include "prohoi/metrics.hpp"

#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

namespace {

double exp_term(double err_sq, double sigma) { return std::exp(-err_sq / sigma); }

}  // namespace

double tracking_reward(const RewardState& state, const RewardState& ref, const RewardConfig& cfg) {
    if (state.body_pos.size() != ref.body_pos.size() ||
        state.body_rot.size() != ref.body_rot.size() ||
        state.body_vel.size() != ref.body_vel.size() ||
        state.body_angvel.size() != ref.body_angvel.size())
        throw DomainError("reward state dimensions do not match the reference");

    double r = 0.0;
    r += cfg.w_rpos * exp_term((state.root_pos - ref.root_pos).squaredNorm(), cfg.sigma_rpos);
    r += cfg.w_rrot * exp_term((state.root_rot - ref.root_rot).squaredNorm(), cfg.sigma_rrot);
    r += cfg.w_bpos * exp_term((state.body_pos - ref.body_pos).squaredNorm(), cfg.sigma_bpos);
    r += cfg.w_brot * exp_term((state.body_rot - ref.body_rot).squaredNorm(), cfg.sigma_brot);
    r += cfg.w_bvel * exp_term((state.body_vel - ref.body_vel).squaredNorm(), cfg.sigma_bvel);
    r += cfg.w_bang * exp_term((state.body_angvel - ref.body_angvel).squaredNorm(), cfg.sigma_bang);
    r += cfg.w_opos * exp_term((state.obj_pos - ref.obj_pos).squaredNorm(), cfg.sigma_opos);

    r += cfg.w_joint_limits * (state.joint_limit_violation ? 1.0 : 0.0);
    r += cfg.w_undesired_contacts * static_cast<double>(state.undesired_contacts);
    r += cfg.w_action_rate * state.action_rate_sq;
    return r;
}

bool grasp_success(const Episode& ep, double h_lift, double t_hold) {
    if (ep.frames.empty()) return false;
    double base_height = ep.frames.front().object_pose.position.z();
    std::size_t run = 0;
    for (const EpisodeFrame& f : ep.frames) {
        bool held = f.hand_contact && f.object_pose.position.z() > base_height + h_lift;
        run = held ? run + 1 : 0;
        if (run >= 2 && static_cast<double>(run - 1) * ep.dt >= t_hold) return true;
    }
    return false;
}

double placement_precision(const Episode& ep, bool planar) {
    if (ep.frames.empty()) throw DomainError("episode is empty");
    Vec3 d = ep.frames.back().object_pose.position - ep.goal_position;
    return planar ? d.head<2>().norm() : d.norm();
}

bool task_success(const Episode& ep, double tol, double h_lift, double t_hold) {
    return grasp_success(ep, h_lift, t_hold) && placement_precision(ep) < tol;
}

TrackingError rpe_roe(const TimedTrajectory& reference, const TimedTrajectory& executed) {
    if (reference.frames.empty() || executed.frames.empty())
        throw DomainError("trajectories must be non-empty");
    TrackingError err;
    std::size_t n = 0;
    for (std::size_t i = 0; i < reference.frames.size(); ++i) {
        double t = reference.time_of(i);
        if (t > executed.duration() + 1e-9 && i > 0) break;  // past the overlap
        Pose exec = executed.sample(t);
        err.rpe += (exec.position - reference.frames[i].pose.position).norm();
        err.roe += angular_distance(exec.rotation, reference.frames[i].pose.rotation);
        ++n;
    }
    if (n == 0) throw DomainError("trajectories do not overlap in time");
    err.rpe /= static_cast<double>(n);
    err.roe /= static_cast<double>(n);
    return err;
}

PhaseLag motion_phase_lag(const TimedTrajectory& reference, const TimedTrajectory& executed,
                          double radius) {
    if (radius <= 0.0) throw ConfigError("phase-lag radius must be positive");
    if (reference.frames.empty() || executed.frames.empty())
        throw DomainError("trajectories must be non-empty");
    PhaseLag out;
    double total = 0.0;
    for (std::size_t i = 0; i < reference.frames.size(); ++i) {
        double ti = reference.time_of(i);
        const Vec3& p_ref = reference.frames[i].pose.position;
        bool found = false;
        for (std::size_t j = 0; j < executed.frames.size(); ++j) {
            double tj = executed.time_of(j);
            if (tj < ti - 1e-12) continue;
            if ((executed.frames[j].pose.position - p_ref).norm() <= radius) {
                total += tj - ti;
                found = true;
                break;
            }
        }
        if (found)
            ++out.reached;
        else
            ++out.unreached;
    }
    if (out.reached == 0) throw UnreachableError("no reference position was ever reached");
    out.mean_lag = total / static_cast<double>(out.reached);
    return out;
}

double contact_phase_lag(const TimedTrajectory& reference, const Episode& ep) {
    std::vector<double> ref_onsets;
    for (std::size_t i = 0; i < reference.frames.size(); ++i) {
        bool prev = i > 0 && reference.frames[i - 1].contact;
        if (reference.frames[i].contact && !prev) ref_onsets.push_back(reference.time_of(i));
    }
    if (ref_onsets.empty()) throw DomainError("reference has no contact transition");

    std::vector<double> actual_onsets;
    for (std::size_t i = 0; i < ep.frames.size(); ++i) {
        bool prev = i > 0 && ep.frames[i - 1].hand_contact;
        if (ep.frames[i].hand_contact && !prev)
            actual_onsets.push_back(static_cast<double>(i) * ep.dt);
    }
    if (actual_onsets.empty()) throw UnreachableError("episode never makes contact");

    std::size_t n = std::min(ref_onsets.size(), actual_onsets.size());
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += actual_onsets[k] - ref_onsets[k];
    return total / static_cast<double>(n);
}

OodGrid generate_ood_grid(const OodGridSpec& spec) {
    if (spec.spacing <= 0.0) throw ConfigError("grid spacing must be positive");
    if (spec.target_step_deg <= 0.0) throw ConfigError("target step must be positive");

    constexpr double kDeg = M_PI / 180.0;
    OodGrid grid;

    std::vector<Eigen::Vector2d> points;
    int nx = static_cast<int>(std::floor((spec.x_max - spec.x_min) / spec.spacing + 1e-9));
    for (int i = 0; i <= nx; ++i) {
        double x = spec.x_min + i * spec.spacing;
        int ny = static_cast<int>(std::floor(x / spec.spacing + 1e-9));
        for (int k = -ny; k <= ny; ++k) points.emplace_back(x, k * spec.spacing);
    }
    grid.grid_points = points.size();
    grid.yaw_count = spec.yaw_set_deg.size();

    std::vector<Vec3> targets;
    int nt = static_cast<int>(std::floor(360.0 / spec.target_step_deg - 1e-9)) + 1;
    for (int a = 0; a < nt; ++a) {
        double ang = a * spec.target_step_deg * kDeg;
        targets.emplace_back(spec.target_radius * std::cos(ang),
                             spec.target_radius * std::sin(ang), 0.0);
    }
    grid.target_count = targets.size();

    grid.scenarios.reserve(points.size() * spec.yaw_set_deg.size() * targets.size());
    for (const auto& p : points)
        for (double yaw_deg : spec.yaw_set_deg)
            for (const Vec3& target : targets)
                grid.scenarios.push_back(
                    {Pose{Vec3(p.x(), p.y(), 0.0), Rotation::from_yaw(yaw_deg * kDeg)}, target});
    return grid;
}

}  // namespace prohoi
