#include "prohoi/pipeline.hpp"

#include <cmath>

#include "prohoi/box_twin.hpp"
#include "prohoi/errors.hpp"
#include "prohoi/io.hpp"
#include "prohoi/occupancy.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/rng.hpp"

namespace prohoi {

namespace {

using nlohmann::json;

// The follower only closes a grasp when the base is this close to the box;
// the squat pick pose sits ~0.48 m from the box center.
constexpr double kAttachRadius = 0.6;

// Single squat-pick prior expressed in the base frame (base at h_stand):
// box half a meter ahead on the floor, pick pose just behind it at 0.45 m.
PriorLibrary builtin_priors(const Config& cfg) {
    PriorLibrary lib;
    PriorEntry e;
    double hz = cfg.twin.box_half_extents.z();
    e.object_pose = {Vec3(0.5, 0.0, hz - cfg.h_stand), Rotation::identity()};
    e.interaction_pose = {Vec3(0.15, 0.0, 0.45 - cfg.h_stand), Rotation::identity()};
    e.source_clip_id = "builtin";
    lib.add(e);
    return lib;
}

OccupancyMap default_map() {
    return OccupancyMap(Vec2(-6.0, -6.0), 0.1, 120, 120);
}

// Object handling mode inside the kinematic follower.
enum class ObjectMode { Resting, Carried, Ballistic };

struct SimState {
    ObjectMode mode = ObjectMode::Resting;
    Pose object;        // world
    Pose carry_offset;  // object in the executed root frame while carried
    TwinState flight;   // ballistic state after a disturbance
    bool disturbed = false;
};

struct SimOutput {
    long alert_frame = -1;  // global executed-frame index, -1 if none
    long frames_executed = 0;
};

// Contact is commanded over the whole descend-grab-ascend span, but the hand
// only reaches the box at the bottom of the squat: attach at the z-trough of
// the commanded-contact run, and only when the base is near the box.
bool at_grab_trough(const TimedTrajectory& ref, std::size_t i) {
    if (!ref.frames[i].contact) return false;
    if (i + 1 >= ref.frames.size()) return true;
    return ref.frames[i + 1].pose.position.z() >= ref.frames[i].pose.position.z() - 1e-12;
}

// Track one reference trajectory with bounded noise, advancing the object
// state machine, feeding the drop monitor, and appending to the episode.
// Stops early when the monitor fires.
SimOutput simulate_segment(const TimedTrajectory& ref, const Config& cfg, Rng& rng,
                           DropMonitor& monitor, SimState& sim, bool allow_disturbance,
                           long frame_base, Episode& episode,
                           std::vector<TrajectoryFrame>& ref_log) {
    SimOutput out;
    const auto delay = static_cast<long>(std::llround(cfg.follower_delay / cfg.dt));
    const auto substeps =
        std::max<long>(1, static_cast<long>(std::llround(cfg.dt / cfg.twin.sim_dt)));

    for (long i = 0; i < static_cast<long>(ref.frames.size()); ++i) {
        long global = frame_base + i;
        auto src = static_cast<std::size_t>(std::max<long>(0, i - delay));
        const TrajectoryFrame& tracked = ref.frames[src];

        Pose exec = tracked.pose;
        exec.position += cfg.follower_noise *
                         Vec3(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                              2.0 * rng.next_double() - 1.0);

        if (allow_disturbance && !sim.disturbed && cfg.disturbance_frame >= 0 &&
            global >= cfg.disturbance_frame && sim.mode == ObjectMode::Carried) {
            sim.disturbed = true;
            sim.mode = ObjectMode::Ballistic;
            sim.flight = {sim.object, cfg.disturbance_linear, cfg.disturbance_angular};
        }
        switch (sim.mode) {
            case ObjectMode::Resting:
                if (at_grab_trough(ref, src) &&
                    (exec.position - sim.object.position).norm() < kAttachRadius) {
                    sim.carry_offset = exec.inverse() * sim.object;
                    sim.mode = ObjectMode::Carried;
                }
                break;
            case ObjectMode::Carried:
                if (!tracked.contact) {
                    sim.mode = ObjectMode::Resting;
                    sim.object.position.z() = cfg.twin.box_half_extents.z();
                } else {
                    sim.object = exec * sim.carry_offset;
                }
                break;
            case ObjectMode::Ballistic: {
                for (long s = 0; s < substeps; ++s) twin_step(sim.flight, cfg.twin);
                sim.object = sim.flight.pose;
                if (sim.flight.linear_velocity.norm() < cfg.twin.settle_lin_eps &&
                    sim.flight.angular_velocity.norm() < cfg.twin.settle_ang_eps)
                    sim.mode = ObjectMode::Resting;
                break;
            }
        }
        bool hand_contact = sim.mode == ObjectMode::Carried;

        bool contact_cmd = ref.frames[i].contact;
        episode.frames.push_back({exec, sim.object, contact_cmd, hand_contact});
        ref_log.push_back(ref.frames[i]);
        ++out.frames_executed;

        StateFrame sf;
        sf.t = static_cast<double>(global) * cfg.dt;
        sf.root_pose = exec;
        sf.object_pose_rel = exec.inverse() * sim.object;
        sf.contact_cmd = contact_cmd;
        sf.hand_contact = hand_contact;
        if (monitor.update(sf) == MonitorStatus::DropAlert) {
            out.alert_frame = global;
            return out;
        }
    }
    return out;
}

struct PlanResult {
    TimedTrajectory trajectory;
    Pose target;
    Pose end;
};

PlanResult plan_cycle(const PriorLibrary& lib, const Config& cfg, const OccupancyMap& map,
                      const Pose& root, const Pose& object_world, const Vec3& goal,
                      json& stage_out) {
    Pose obj_rel = root.inverse() * object_world;
    RetrievalResult hit = lib.retrieve(obj_rel, cfg.retrieval);
    Pose target = lib.target_pose(hit.index, obj_rel, root);
    stage_out["prior_index"] = hit.index;
    stage_out["prior_score"] = hit.score;
    stage_out["target_pose"] = io::to_json(target);

    // Place the end pose so the carried box, held at the offset grabbed at
    // the pick, lands on the goal while the robot faces along object -> goal.
    Eigen::Vector2d dir = goal.head<2>() - object_world.position.head<2>();
    if (dir.norm() < 1e-9) dir = Eigen::Vector2d(1.0, 0.0);
    dir.normalize();
    double end_yaw = std::atan2(dir.y(), dir.x());
    Eigen::Vector2d offset_rel = (target.inverse() * object_world).position.head<2>();
    Eigen::Rotation2Dd rot_end(end_yaw);
    Eigen::Vector2d end_xy = goal.head<2>() - rot_end * offset_rel;
    Pose end{Vec3(end_xy.x(), end_xy.y(), target.position.z()), Rotation::from_yaw(end_yaw)};

    PlanarWaypoint start_wp{target.position.x(), target.position.y(), yaw_of(target.rotation)};
    PlanarWaypoint goal_wp{end.position.x(), end.position.y(), end_yaw};
    auto nav = plan_path(map, start_wp, goal_wp, cfg.inflation_radius);
    auto nav_poses = lift_waypoints(nav, cfg.h_stand);

    auto seq = build_sequence(root, target, end, nav_poses, cfg.h_stand);
    PlanResult out;
    out.trajectory = interpolate_trajectory(seq, cfg.profile(cfg.default_profile), cfg.dt);
    out.target = target;
    out.end = end;
    stage_out["nav_waypoints"] = nav.size();
    stage_out["sequence_length"] = seq.size();
    stage_out["frames"] = out.trajectory.frames.size();
    stage_out["duration_s"] = out.trajectory.duration();
    return out;
}

std::size_t count_contact_runs(const Episode& ep) {
    std::size_t runs = 0;
    for (std::size_t i = 0; i < ep.frames.size(); ++i) {
        bool prev = i > 0 && ep.frames[i - 1].contact_cmd;
        if (ep.frames[i].contact_cmd && !prev) ++runs;
    }
    return runs;
}

}  // namespace

json run_pipeline(const Scenario& scenario, const Config& config, std::uint64_t seed) {
    Rng rng(seed);
    json report;
    report["seed"] = seed;
    report["scenario"] = {{"object_pose", io::to_json(scenario.object_pose)},
                          {"target_position", io::to_json(scenario.target_position)}};
    json& stages = report["stages"];
    for (const char* name :
         {"retrieval", "plan", "execute", "monitor", "twin", "recovery", "metrics"})
        stages[name] = {{"status", "skipped"}};

    PriorLibrary lib =
        config.priors_path.empty() ? builtin_priors(config) : io::load_priors(config.priors_path);
    OccupancyMap map = config.map_path.empty()
                           ? default_map()
                           : OccupancyMap::load_pgm(config.map_path, config.map_sidecar_path);

    Pose object = scenario.object_pose;
    object.position.z() = std::max(object.position.z(), config.twin.box_half_extents.z());
    Pose root0{Vec3(0.0, 0.0, config.h_stand), Rotation::identity()};

    Episode episode;
    episode.dt = config.dt;
    episode.goal_position = scenario.target_position;
    std::vector<TrajectoryFrame> ref_log;

    PlanResult plan;
    try {
        json stage;
        plan = plan_cycle(lib, config, map, root0, object, scenario.target_position, stage);
        stages["retrieval"] = {{"status", "ok"},
                               {"prior_index", stage["prior_index"]},
                               {"prior_score", stage["prior_score"]},
                               {"target_pose", stage["target_pose"]}};
        stage.erase("prior_index");
        stage.erase("prior_score");
        stage.erase("target_pose");
        stage["status"] = "ok";
        stages["plan"] = stage;
    } catch (const std::exception& e) {
        stages["retrieval"] = {{"status", "failed"}, {"error", e.what()}};
        report["error"] = std::string("plan: ") + e.what();
        return report;
    }

    DropMonitor monitor(config.monitor_region(), config.monitor_window);
    SimState sim;
    sim.object = object;
    SimOutput exec_out =
        simulate_segment(plan.trajectory, config, rng, monitor, sim, true, 0, episode, ref_log);
    stages["execute"] = {{"status", "ok"}, {"frames", exec_out.frames_executed}};
    stages["monitor"] = {{"status", "ok"},
                         {"alerts", exec_out.alert_frame >= 0 ? 1 : 0},
                         {"alert_frame", exec_out.alert_frame}};

    if (exec_out.alert_frame >= 0) {
        const Pose root_alert = episode.frames.back().root_pose;

        // velocity estimate from the recent stream, re-expressed against the
        // alert-frame root so the world mapping is exact
        std::vector<StateFrame> rel_hist;
        for (const StateFrame& f : monitor.history()) {
            StateFrame g = f;
            g.object_pose_rel = root_alert.inverse() * (f.root_pose * f.object_pose_rel);
            rel_hist.push_back(g);
        }

        try {
            VelocityEstimate vel = estimate_release_velocity(rel_hist, root_alert);
            Pose object_now = root_alert * rel_hist.back().object_pose_rel;
            RestingPrediction prediction;
            try {
                prediction = predict_resting_pose(object_now, vel, config.twin);
            } catch (const SettleTimeoutError& e) {
                prediction = {e.last_pose, config.twin.max_sim_time};
            }
            stages["twin"] = {{"status", "ok"},
                              {"resting_pose", io::to_json(prediction.resting)},
                              {"settle_time_s", prediction.settle_time},
                              {"release_linear", io::to_json(vel.linear)},
                              {"release_angular", io::to_json(vel.angular)}};

            GazeResult gaze =
                gaze_adjustment(root_alert, prediction.resting.position, config.camera_fov_h,
                                config.gaze_standoff, config.h_stand);
            Vec3 obj_in_gaze = gaze.pose.inverse().apply(prediction.resting.position);
            double bearing = std::atan2(obj_in_gaze.y(), obj_in_gaze.x());

            // finish the flight so the follower knows where the box really is
            while (sim.mode == ObjectMode::Ballistic) {
                twin_step(sim.flight, config.twin);
                sim.object = sim.flight.pose;
                if (sim.flight.linear_velocity.norm() < config.twin.settle_lin_eps &&
                    sim.flight.angular_velocity.norm() < config.twin.settle_ang_eps)
                    sim.mode = ObjectMode::Resting;
            }

            json recovery_stage;
            recovery_stage["gaze_pose"] = io::to_json(gaze.pose);
            recovery_stage["gaze_bearing_rad"] = bearing;
            recovery_stage["prediction_error_m"] =
                (prediction.resting.position - sim.object.position).norm();

            // replan: approach the gaze pose, then a fresh pick-place cycle
            TimedTrajectory to_gaze =
                interpolate_trajectory({{root_alert, false}, {gaze.pose, false}},
                                       config.profile(config.default_profile), config.dt);
            PlanResult replan = plan_cycle(lib, config, map, gaze.pose, sim.object,
                                           scenario.target_position, recovery_stage);
            recovery_stage["status"] = "ok";
            stages["recovery"] = recovery_stage;

            monitor.reset();
            long base = exec_out.alert_frame + 1;
            SimOutput g1 = simulate_segment(to_gaze, config, rng, monitor, sim, false, base,
                                            episode, ref_log);
            base += g1.frames_executed;
            simulate_segment(replan.trajectory, config, rng, monitor, sim, false, base, episode,
                             ref_log);
        } catch (const std::exception& e) {
            stages["recovery"] = {{"status", "failed"}, {"error", e.what()}};
        }
    }

    // metrics over the executed episode against the concatenated reference
    try {
        TimedTrajectory reference{config.dt, ref_log};
        TimedTrajectory executed;
        executed.dt = config.dt;
        for (const auto& f : episode.frames)
            executed.frames.push_back({f.root_pose, f.hand_contact});
        episode.reference = reference;

        json m;
        m["status"] = "ok";
        m["grasp_success"] = grasp_success(episode, config.grasp_h_lift, config.grasp_t_hold);
        m["placement_precision_m"] = placement_precision(episode);
        m["task_success"] =
            task_success(episode, config.task_tolerance, config.grasp_h_lift, config.grasp_t_hold);
        TrackingError te = rpe_roe(reference, executed);
        m["rpe_m"] = te.rpe;
        m["roe_rad"] = te.roe;
        try {
            PhaseLag mpl = motion_phase_lag(reference, executed, config.mpl_radius);
            m["mpl_s"] = mpl.mean_lag;
            m["mpl_unreached"] = mpl.unreached;
        } catch (const std::exception& e) {
            m["mpl_error"] = e.what();
        }
        try {
            m["cpl_s"] = contact_phase_lag(reference, episode);
        } catch (const std::exception& e) {
            m["cpl_error"] = e.what();
        }
        m["contact_runs"] = count_contact_runs(episode);
        m["episode_frames"] = episode.frames.size();
        stages["metrics"] = m;
    } catch (const std::exception& e) {
        stages["metrics"] = {{"status", "failed"}, {"error", e.what()}};
    }

    return report;
}

json run_pipeline_batch(const std::vector<Scenario>& scenarios, const Config& config,
                        std::uint64_t seed) {
    json report;
    report["seed"] = seed;
    report["count"] = scenarios.size();
    json runs = json::array();
    std::size_t grasp_ok = 0, task_ok = 0;
    double precision_sum = 0.0;
    std::size_t precision_n = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        json r = run_pipeline(scenarios[i], config, seed + i);
        const json& m = r["stages"]["metrics"];
        json summary = {{"index", i}};
        if (m.value("status", "") == std::string("ok")) {
            bool grasp = m["grasp_success"].get<bool>();
            summary["grasp_success"] = grasp;
            summary["task_success"] = m["task_success"];
            summary["placement_precision_m"] = m["placement_precision_m"];
            if (grasp) {
                precision_sum += m["placement_precision_m"].get<double>();
                ++precision_n;
            }
            grasp_ok += grasp ? 1 : 0;
            task_ok += m["task_success"].get<bool>() ? 1 : 0;
        } else {
            summary["error"] = m.value("error", "metrics unavailable");
        }
        runs.push_back(summary);
    }
    report["runs"] = runs;
    report["aggregate"] = {
        {"grasp_success_rate",
         scenarios.empty() ? 0.0 : static_cast<double>(grasp_ok) / scenarios.size()},
        {"task_success_rate",
         scenarios.empty() ? 0.0 : static_cast<double>(task_ok) / scenarios.size()},
        {"mean_placement_precision_m",
         precision_n == 0 ? 0.0 : precision_sum / static_cast<double>(precision_n)}};
    return report;
}

}  // namespace prohoi
