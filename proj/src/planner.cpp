#include "prohoi/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "prohoi/errors.hpp"

namespace prohoi {

Pose TimedTrajectory::sample(double t) const {
    if (frames.empty()) throw DomainError("cannot sample an empty trajectory");
    if (t <= 0.0) return frames.front().pose;
    double u = t / dt;
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i + 1 >= frames.size()) return frames.back().pose;
    return interpolate_pose(frames[i].pose, frames[i + 1].pose, u - static_cast<double>(i));
}

namespace {

struct AStarNode {
    double f;
    int idx;
    bool operator>(const AStarNode& o) const { return f > o.f; }
};

constexpr double kSqrt2 = 1.4142135623730951;

double octile(int dx, int dy) {
    dx = std::abs(dx);
    dy = std::abs(dy);
    return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
}

}  // namespace

std::vector<PlanarWaypoint> plan_path(const OccupancyMap& map, const PlanarWaypoint& start,
                                      const PlanarWaypoint& goal, double inflation_radius) {
    OccupancyMap grid = map.inflated(inflation_radius);
    auto [sx, sy] = grid.cell_of(Vec2(start.x, start.y));
    auto [gx, gy] = grid.cell_of(Vec2(goal.x, goal.y));
    if (!grid.in_bounds(sx, sy) || grid.occupied(sx, sy))
        throw InvalidEndpointError("start cell is occupied or out of bounds");
    if (!grid.in_bounds(gx, gy) || grid.occupied(gx, gy))
        throw InvalidEndpointError("goal cell is occupied or out of bounds");

    const int w = grid.width();
    const int h = grid.height();
    const int n = w * h;
    const int start_idx = sy * w + sx;
    const int goal_idx = gy * w + gx;

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::priority_queue<AStarNode, std::vector<AStarNode>, std::greater<>> open;
    dist[start_idx] = 0.0;
    open.push({octile(gx - sx, gy - sy), start_idx});

    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    static constexpr double kCost[8] = {1, 1, 1, 1, kSqrt2, kSqrt2, kSqrt2, kSqrt2};

    while (!open.empty()) {
        auto [f, cur] = open.top();
        open.pop();
        if (cur == goal_idx) break;
        int cx = cur % w, cy = cur / w;
        if (f > dist[cur] + octile(gx - cx, gy - cy) + 1e-12) continue;  // stale entry
        for (int k = 0; k < 8; ++k) {
            int nx = cx + kDx[k], ny = cy + kDy[k];
            if (!grid.in_bounds(nx, ny) || grid.occupied(nx, ny)) continue;
            // no corner cutting on diagonal moves
            if (k >= 4 && (grid.occupied(cx + kDx[k], cy) || grid.occupied(cx, cy + kDy[k])))
                continue;
            int ni = ny * w + nx;
            double nd = dist[cur] + kCost[k];
            if (nd < dist[ni] - 1e-12) {
                dist[ni] = nd;
                parent[ni] = cur;
                open.push({nd + octile(gx - nx, gy - ny), ni});
            }
        }
    }
    if (!std::isfinite(dist[goal_idx])) throw UnreachableError("no path between start and goal");

    std::vector<int> cells;
    for (int c = goal_idx; c != -1; c = parent[c]) cells.push_back(c);
    std::reverse(cells.begin(), cells.end());

    // Shortcut: greedily keep the farthest cell visible from the current one.
    std::vector<int> keep;
    std::size_t i = 0;
    keep.push_back(cells.front());
    while (i + 1 < cells.size()) {
        std::size_t j = cells.size() - 1;
        for (; j > i + 1; --j) {
            if (grid.line_of_sight(cells[i] % w, cells[i] / w, cells[j] % w, cells[j] / w)) break;
        }
        keep.push_back(cells[j]);
        i = j;
    }

    std::vector<PlanarWaypoint> path;
    path.reserve(keep.size());
    for (int c : keep) {
        Vec2 p = grid.cell_center(c % w, c / w);
        path.push_back({p.x(), p.y(), 0.0});
    }
    // exact endpoints rather than cell centers
    path.front().x = start.x;
    path.front().y = start.y;
    path.back().x = goal.x;
    path.back().y = goal.y;

    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        path[k].psi = normalize_angle(
            std::atan2(path[k + 1].y - path[k].y, path[k + 1].x - path[k].x));
    }
    path.back().psi = normalize_angle(goal.psi);
    if (path.size() == 1) path.front().psi = normalize_angle(goal.psi);
    return path;
}

std::vector<Pose> lift_waypoints(const std::vector<PlanarWaypoint>& path, double h_stand) {
    if (h_stand <= 0.0) throw ConfigError("h_stand must be positive");
    std::vector<Pose> out;
    out.reserve(path.size());
    for (const auto& wp : path)
        out.push_back({Vec3(wp.x, wp.y, h_stand), Rotation::from_yaw(wp.psi)});
    return out;
}

namespace {

Pose at_height(const Pose& p, double z) {
    Pose out = p;
    out.position.z() = z;
    return out;
}

}  // namespace

std::vector<TrajectoryFrame> build_sequence(const Pose& current, const Pose& target,
                                            const Pose& end, const std::vector<Pose>& nav_waypoints,
                                            double h_stand) {
    std::vector<TrajectoryFrame> seq;
    seq.reserve(nav_waypoints.size() + 7);
    seq.push_back({current, false});
    seq.push_back({at_height(target, h_stand), false});
    seq.push_back({target, true});
    seq.push_back({at_height(target, h_stand), true});
    for (const auto& wp : nav_waypoints) seq.push_back({wp, true});
    seq.push_back({at_height(end, h_stand), true});
    seq.push_back({end, true});
    seq.push_back({at_height(end, h_stand), false});
    return seq;
}

TimedTrajectory interpolate_trajectory(const std::vector<TrajectoryFrame>& waypoints,
                                       const VelocityLimits& limits, double dt) {
    if (limits.v_max <= 0.0 || limits.omega_max <= 0.0 || dt <= 0.0)
        throw ConfigError("velocity limits and dt must be positive");
    if (waypoints.empty()) throw ConfigError("at least one waypoint required");

    TimedTrajectory traj;
    traj.dt = dt;
    traj.frames.push_back(waypoints.front());
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const auto& a = waypoints[i];
        const auto& b = waypoints[i + 1];
        double d_lin = (b.pose.position - a.pose.position).norm();
        double d_ang = angular_distance(a.pose.rotation, b.pose.rotation);
        double duration = std::max(d_lin / limits.v_max, d_ang / limits.omega_max);
        auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-12));
        if (steps == 0) steps = 1;  // coincident waypoints still take one frame
        for (std::size_t j = 1; j <= steps; ++j) {
            double s = static_cast<double>(j) / static_cast<double>(steps);
            Pose p = (j == steps) ? b.pose : interpolate_pose(a.pose, b.pose, s);
            traj.frames.push_back({p, b.contact});
        }
    }
    return traj;
}

GoalObservation goal_observation(const Pose& current_root, const TrajectoryFrame& reference) {
    GoalObservation g;
    Rotation rinv = current_root.rotation.inverse();
    g.delta_p = rinv * (reference.pose.position - current_root.position);
    g.delta_r = encode_rot6d(rinv * reference.pose.rotation);
    g.contact = reference.contact;
    return g;
}

}  // namespace prohoi
