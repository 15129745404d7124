#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "prohoi/errors.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/rng.hpp"
#include "test_util.hpp"

using namespace prohoi;
using testutil::random_pose;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Exact shortest-path oracle on the inflated grid: plain Dijkstra with the
// same 8-connected moves and no-corner-cutting rule.
double dijkstra_cost(const OccupancyMap& grid, int sx, int sy, int gx, int gy) {
    const int w = grid.width(), h = grid.height();
    std::vector<double> dist(static_cast<std::size_t>(w) * h,
                             std::numeric_limits<double>::infinity());
    using Node = std::pair<double, int>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    dist[sy * w + sx] = 0.0;
    open.emplace(0.0, sy * w + sx);
    static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    static constexpr double cost[8] = {1, 1, 1, 1, kSqrt2, kSqrt2, kSqrt2, kSqrt2};
    while (!open.empty()) {
        auto [d, cur] = open.top();
        open.pop();
        if (d > dist[cur] + 1e-12) continue;
        int cx = cur % w, cy = cur / w;
        for (int k = 0; k < 8; ++k) {
            int nx = cx + dx[k], ny = cy + dy[k];
            if (!grid.in_bounds(nx, ny) || grid.occupied(nx, ny)) continue;
            if (k >= 4 && (grid.occupied(cx + dx[k], cy) || grid.occupied(cx, cy + dy[k])))
                continue;
            double nd = d + cost[k];
            int ni = ny * w + nx;
            if (nd < dist[ni] - 1e-12) {
                dist[ni] = nd;
                open.emplace(nd, ni);
            }
        }
    }
    return dist[gy * w + gx];
}

double polyline_length(const std::vector<PlanarWaypoint>& path) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        len += std::hypot(path[i + 1].x - path[i].x, path[i + 1].y - path[i].y);
    return len;
}

OccupancyMap empty_map() { return OccupancyMap(Vec2(-3, -3), 0.1, 60, 60); }

}  // namespace

TEST_CASE("plan_path: obstacle-free straight line") {
    std::vector<PlanarWaypoint> path = plan_path(empty_map(), {0, 0, 0}, {2, 0, 0}, 0.0);
    CHECK(path.size() == 2);
    CHECK(path.front().x == doctest::Approx(0.0));
    CHECK(path.back().x == doctest::Approx(2.0));
    for (const auto& wp : path) CHECK(wp.psi == doctest::Approx(0.0));
}

TEST_CASE("plan_path: wall forces a detour") {
    OccupancyMap map = empty_map();
    map.fill_box(Vec2(0.9, -1.5), Vec2(1.1, 3.0));  // wall with a gap at the bottom
    std::vector<PlanarWaypoint> path = plan_path(map, {0, 0, 0}, {2, 0, 0}, 0.0);
    double euclid = 2.0;
    CHECK(polyline_length(path) > euclid + 0.1);
    OccupancyMap inflated = map.inflated(0.0);
    for (const auto& wp : path) {
        auto [ix, iy] = inflated.cell_of(Vec2(wp.x, wp.y));
        CHECK(inflated.in_bounds(ix, iy));
        CHECK_FALSE(inflated.occupied(ix, iy));
    }
}

TEST_CASE("plan_path: cost within 1.01x of the Dijkstra oracle on random maps") {
    Rng rng(31);
    int solved = 0;
    for (int trial = 0; trial < 20; ++trial) {
        OccupancyMap map(Vec2(0, 0), 0.1, 50, 50);
        for (int b = 0; b < 12; ++b) {
            double x = rng.uniform(0.5, 4.5), y = rng.uniform(0.5, 4.5);
            map.fill_box(Vec2(x, y), Vec2(x + rng.uniform(0.1, 0.8), y + rng.uniform(0.1, 0.8)));
        }
        double inflation = 0.1;
        OccupancyMap grid = map.inflated(inflation);
        // start/goal on free cell centers so endpoint snapping is exact
        auto pick_free = [&](int lo, int hi) -> std::pair<int, int> {
            for (int tries = 0; tries < 200; ++tries) {
                int ix = lo + static_cast<int>(rng.uniform(0, hi - lo));
                int iy = lo + static_cast<int>(rng.uniform(0, hi - lo));
                if (!grid.occupied(ix, iy)) return {ix, iy};
            }
            return {-1, -1};
        };
        auto [sx, sy] = pick_free(1, 10);
        auto [gx, gy] = pick_free(40, 49);
        if (sx < 0 || gx < 0) continue;
        Vec2 s = grid.cell_center(sx, sy), g = grid.cell_center(gx, gy);
        double oracle = dijkstra_cost(grid, sx, sy, gx, gy) * grid.cell_size();
        std::vector<PlanarWaypoint> path;
        try {
            path = plan_path(map, {s.x(), s.y(), 0.0}, {g.x(), g.y(), 0.3}, inflation);
        } catch (const UnreachableError&) {
            CHECK(!std::isfinite(oracle));
            continue;
        }
        REQUIRE(std::isfinite(oracle));
        CHECK(polyline_length(path) <= 1.01 * oracle + 1e-9);
        CHECK(polyline_length(path) >= (g - s).norm() - 1e-9);
        // consecutive waypoints mutually visible on the inflated grid
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            auto [ax, ay] = grid.cell_of(Vec2(path[i].x, path[i].y));
            auto [bx, by] = grid.cell_of(Vec2(path[i + 1].x, path[i + 1].y));
            CHECK(grid.line_of_sight(ax, ay, bx, by));
        }
        // tangent yaws, final yaw = goal yaw
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            double want = std::atan2(path[i + 1].y - path[i].y, path[i + 1].x - path[i].x);
            CHECK(std::abs(normalize_angle(path[i].psi - want)) < 1e-9);
        }
        CHECK(path.back().psi == doctest::Approx(0.3));
        ++solved;
    }
    CHECK(solved >= 10);
}

TEST_CASE("plan_path endpoint validation") {
    OccupancyMap map = empty_map();
    map.fill_box(Vec2(-0.2, -0.2), Vec2(0.2, 0.2));
    CHECK_THROWS_AS(plan_path(map, {0, 0, 0}, {2, 0, 0}, 0.0), InvalidEndpointError);
    CHECK_THROWS_AS(plan_path(map, {2, 0, 0}, {0, 0, 0}, 0.0), InvalidEndpointError);
    CHECK_THROWS_AS(plan_path(map, {2, 0, 0}, {-9, 0, 0}, 0.0), InvalidEndpointError);

    OccupancyMap walled = empty_map();
    walled.fill_box(Vec2(0.9, -3.0), Vec2(1.1, 3.0));  // full-height wall
    CHECK_THROWS_AS(plan_path(walled, {0, 0, 0}, {2, 0, 0}, 0.0), UnreachableError);
}

TEST_CASE("lift_waypoints") {
    std::vector<Pose> lifted = lift_waypoints({{0, 0, 0}}, 0.75);
    REQUIRE(lifted.size() == 1);
    CHECK((lifted[0].position - Vec3(0, 0, 0.75)).norm() < 1e-12);
    CHECK(angular_distance(lifted[0].rotation, Rotation::identity()) < 1e-12);

    std::vector<Pose> one = lift_waypoints({{1, 2, M_PI / 2}}, 0.8);
    CHECK((one[0].position - Vec3(1, 2, 0.8)).norm() < 1e-12);
    CHECK(angular_distance(one[0].rotation, Rotation::from_yaw(M_PI / 2)) < 1e-12);

    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<PlanarWaypoint> path;
        for (int i = 0; i < 8; ++i)
            path.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5),
                            normalize_angle(rng.uniform(-10, 10))});
        for (const Pose& p : lift_waypoints(path, 0.75)) {
            Mat3 m = p.rotation.matrix();
            CHECK(std::abs(m(2, 0)) < 1e-12);  // zero pitch
            CHECK(std::abs(m(2, 1)) < 1e-12);  // zero roll
            CHECK(p.position.z() == 0.75);
        }
        std::vector<Pose> lifted2 = lift_waypoints(path, 0.75);
        for (std::size_t i = 0; i < path.size(); ++i)
            CHECK(std::abs(normalize_angle(yaw_of(lifted2[i].rotation) - path[i].psi)) < 1e-12);
    }
    CHECK_THROWS_AS(lift_waypoints({{0, 0, 0}}, -1.0), ConfigError);
}

TEST_CASE("build_sequence structure") {
    Pose current{Vec3(0, 0, 0.75), Rotation::identity()};

    SUBCASE("degenerate in-place cycle has length 7") {
        std::vector<TrajectoryFrame> seq = build_sequence(current, current, current, {}, 0.75);
        CHECK(seq.size() == 7);
        for (const auto& f : seq) CHECK(f.pose.position.z() == doctest::Approx(0.75));
    }

    SUBCASE("squat pick heights and contact pattern") {
        Pose target{Vec3(1, 0, 0.45), Rotation::identity()};
        Pose end{Vec3(3, 0, 0.45), Rotation::identity()};
        std::vector<TrajectoryFrame> seq = build_sequence(current, target, end, {}, 0.75);
        REQUIRE(seq.size() == 7);
        CHECK(seq[1].pose.position.z() == doctest::Approx(0.75));  // target up-pose
        CHECK(seq[2].pose.position.z() == doctest::Approx(0.45));  // squat target
        std::vector<bool> contacts;
        for (const auto& f : seq) contacts.push_back(f.contact);
        CHECK(contacts == std::vector<bool>{false, false, true, true, true, true, false});
    }

    SUBCASE("random inputs: length M + 7 and contact boundaries") {
        Rng rng(33);
        for (int trial = 0; trial < 100; ++trial) {
            std::size_t m = static_cast<std::size_t>(rng.uniform(0, 6));
            std::vector<Pose> nav;
            for (std::size_t i = 0; i < m; ++i) nav.push_back(random_pose(rng));
            std::vector<TrajectoryFrame> seq =
                build_sequence(random_pose(rng), random_pose(rng), random_pose(rng), nav, 0.75);
            REQUIRE(seq.size() == m + 7);
            for (std::size_t i = 0; i < seq.size(); ++i) {
                bool want = i >= 2 && i <= m + 5;  // target entry .. end entry
                CHECK(seq[i].contact == want);
            }
        }
    }
}

TEST_CASE("interpolate_trajectory: step counts and velocity bounds") {
    SUBCASE("single waypoint") {
        TimedTrajectory traj = interpolate_trajectory({{Pose::identity(), false}}, {0.2, 0.6}, 0.02);
        CHECK(traj.frames.size() == 1);
    }

    SUBCASE("1 m at the slow profile: 250 steps of at most 4 mm") {
        TrajectoryFrame a{Pose::identity(), false};
        TrajectoryFrame b{{Vec3(1, 0, 0), Rotation::identity()}, true};
        TimedTrajectory traj = interpolate_trajectory({a, b}, {0.2, 0.6}, 0.02);
        CHECK(traj.frames.size() == 251);  // initial frame + 250 steps
        double max_step = 0.0;
        for (std::size_t i = 0; i + 1 < traj.frames.size(); ++i)
            max_step = std::max(max_step, (traj.frames[i + 1].pose.position -
                                           traj.frames[i].pose.position)
                                              .norm());
        CHECK(max_step == doctest::Approx(0.004).epsilon(1e-9));
        CHECK(traj.duration() == doctest::Approx(5.0));
    }

    SUBCASE("random waypoint lists respect all three velocity profiles") {
        Rng rng(34);
        const VelocityLimits profiles[] = {{0.2, 0.6}, {0.4, 1.0}, {0.6, 1.3}};
        for (const VelocityLimits& lim : profiles) {
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<TrajectoryFrame> wps;
                int n = 2 + static_cast<int>(rng.uniform(0, 5));
                for (int i = 0; i < n; ++i)
                    wps.push_back({random_pose(rng), rng.next_double() < 0.5});
                TimedTrajectory traj = interpolate_trajectory(wps, lim, 0.02);
                for (std::size_t i = 0; i + 1 < traj.frames.size(); ++i) {
                    double dp = (traj.frames[i + 1].pose.position -
                                 traj.frames[i].pose.position)
                                    .norm();
                    double dr = angular_distance(traj.frames[i + 1].pose.rotation,
                                                 traj.frames[i].pose.rotation);
                    CHECK(dp <= lim.v_max * traj.dt + 1e-9);
                    CHECK(dr <= lim.omega_max * traj.dt + 1e-9);
                }
                // every waypoint pose appears exactly at a segment boundary
                for (const auto& wp : wps) {
                    bool hit = false;
                    for (const auto& f : traj.frames) {
                        if ((f.pose.position - wp.pose.position).norm() < 1e-12 &&
                            angular_distance(f.pose.rotation, wp.pose.rotation) < 1e-6) {
                            hit = true;
                            break;
                        }
                    }
                    CHECK(hit);
                }
            }
        }
    }

    SUBCASE("doubling limits roughly halves duration, never stretches it") {
        Rng rng(35);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<TrajectoryFrame> wps;
            int n = 2 + static_cast<int>(rng.uniform(0, 4));
            for (int i = 0; i < n; ++i) wps.push_back({random_pose(rng), false});
            TimedTrajectory slow = interpolate_trajectory(wps, {0.2, 0.6}, 0.02);
            TimedTrajectory fast = interpolate_trajectory(wps, {0.4, 1.2}, 0.02);
            CHECK(fast.duration() <= slow.duration() / 2.0 + n * 0.02 + 1e-9);
        }
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(interpolate_trajectory({}, {0.2, 0.6}, 0.02), ConfigError);
        CHECK_THROWS_AS(interpolate_trajectory({{Pose::identity(), false}}, {0.0, 0.6}, 0.02),
                        ConfigError);
        CHECK_THROWS_AS(interpolate_trajectory({{Pose::identity(), false}}, {0.2, -1.0}, 0.02),
                        ConfigError);
        CHECK_THROWS_AS(interpolate_trajectory({{Pose::identity(), false}}, {0.2, 0.6}, 0.0),
                        ConfigError);
    }
}

TEST_CASE("contact flags copy the destination waypoint of each segment") {
    TrajectoryFrame a{Pose::identity(), false};
    TrajectoryFrame b{{Vec3(0.1, 0, 0), Rotation::identity()}, true};
    TrajectoryFrame c{{Vec3(0.2, 0, 0), Rotation::identity()}, false};
    TimedTrajectory traj = interpolate_trajectory({a, b, c}, {0.2, 0.6}, 0.02);
    REQUIRE(traj.frames.size() >= 3);
    CHECK_FALSE(traj.frames.front().contact);
    // frames of the first segment carry b's contact flag
    bool seen_true = false, seen_false_after_true = false;
    for (std::size_t i = 1; i < traj.frames.size(); ++i) {
        if (traj.frames[i].contact) seen_true = true;
        if (seen_true && !traj.frames[i].contact) seen_false_after_true = true;
    }
    CHECK(seen_true);
    CHECK(seen_false_after_true);
}

TEST_CASE("goal_observation") {
    SUBCASE("zero deviation") {
        Rng rng(36);
        Pose p = random_pose(rng);
        GoalObservation g = goal_observation(p, {p, true});
        CHECK(g.delta_p.norm() < 1e-12);
        CHECK(angular_distance(decode_rot6d(g.delta_r), Rotation::identity()) < 1e-6);
        CHECK(g.contact);
    }

    SUBCASE("one meter ahead along the facing direction") {
        Rng rng(37);
        for (int i = 0; i < 50; ++i) {
            Pose root = random_pose(rng);
            Pose ref = root;
            ref.position += root.rotation * Vec3(1, 0, 0);
            GoalObservation g = goal_observation(root, {ref, false});
            CHECK((g.delta_p - Vec3(1, 0, 0)).norm() < 1e-9);
        }
    }

    SUBCASE("reconstruction oracle over random pairs") {
        Rng rng(38);
        for (int i = 0; i < 1000; ++i) {
            Pose root = random_pose(rng), ref = random_pose(rng);
            GoalObservation g = goal_observation(root, {ref, true});
            Vec3 p_rec = root.position + root.rotation * g.delta_p;
            Rotation r_rec = root.rotation * decode_rot6d(g.delta_r);
            CHECK((p_rec - ref.position).norm() < 1e-9);
            CHECK(angular_distance(r_rec, ref.rotation) < 1e-6);
        }
    }

    SUBCASE("invariance under a global rigid transform") {
        Rng rng(39);
        for (int i = 0; i < 200; ++i) {
            Pose root = random_pose(rng), ref = random_pose(rng), world = random_pose(rng);
            GoalObservation base = goal_observation(root, {ref, false});
            GoalObservation moved = goal_observation(world * root, {world * ref, false});
            CHECK((base.delta_p - moved.delta_p).norm() < 1e-9);
            CHECK((base.delta_r - moved.delta_r).norm() < 1e-9);
        }
    }
}

TEST_CASE("TimedTrajectory::sample clamps and interpolates") {
    TrajectoryFrame a{Pose::identity(), false};
    TrajectoryFrame b{{Vec3(1, 0, 0), Rotation::identity()}, false};
    TimedTrajectory traj = interpolate_trajectory({a, b}, {0.5, 1.0}, 0.02);
    CHECK(traj.sample(-1.0).position.norm() < 1e-12);
    CHECK((traj.sample(1e9).position - Vec3(1, 0, 0)).norm() < 1e-12);
    Pose mid = traj.sample(traj.duration() / 2.0);
    CHECK(mid.position.x() == doctest::Approx(0.5).epsilon(1e-9));
}
