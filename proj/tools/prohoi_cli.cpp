// Command-line front end: planning, prior retrieval, drop monitoring, twin
// prediction, contact optimization, evaluation, grid generation, and the
// end-to-end pipeline. Exit codes: 0 ok, 2 validation error, 3 stage failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prohoi/box_twin.hpp"
#include "prohoi/config.hpp"
#include "prohoi/contact_opt.hpp"
#include "prohoi/errors.hpp"
#include "prohoi/io.hpp"
#include "prohoi/metrics.hpp"
#include "prohoi/occupancy.hpp"
#include "prohoi/pipeline.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/sdf.hpp"

namespace {

using nlohmann::json;
using namespace prohoi;

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kStageFailure = 3;

std::vector<double> parse_csv_doubles(const std::string& text, std::size_t expect,
                                      const std::string& what) {
    std::string body = text;
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream ss(body);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.size() != expect)
        throw ConfigError(what + ": expected " + std::to_string(expect) + " comma-separated numbers");
    return vals;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        io::write_text(out_path, j.dump(2) + "\n");
    }
}

void emit_trajectory(const TimedTrajectory& traj, const std::string& out_path) {
    if (out_path.empty()) {
        for (std::size_t i = 0; i < traj.frames.size(); ++i) {
            json line = {{"t", traj.time_of(i)},
                         {"pose", io::to_json(traj.frames[i].pose)},
                         {"contact", traj.frames[i].contact}};
            std::cout << line.dump() << "\n";
        }
    } else {
        io::save_trajectory(traj, out_path);
    }
}

OccupancyMap load_map_or_default(const std::string& map_path, const std::string& sidecar) {
    if (map_path.empty()) return OccupancyMap(Vec2(-6.0, -6.0), 0.1, 120, 120);
    std::string side = sidecar.empty() ? map_path + ".json" : sidecar;
    return OccupancyMap::load_pgm(map_path, side);
}

struct GlobalArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;

    Config config() const {
        return config_path.empty() ? Config{} : Config::load(config_path);
    }
};

json episode_metrics(const Episode& ep, const TimedTrajectory* reference, const Config& cfg) {
    json m;
    m["grasp_success"] = grasp_success(ep, cfg.grasp_h_lift, cfg.grasp_t_hold);
    m["placement_precision_m"] = placement_precision(ep);
    m["task_success"] = task_success(ep, cfg.task_tolerance, cfg.grasp_h_lift, cfg.grasp_t_hold);
    if (reference != nullptr) {
        TimedTrajectory executed;
        executed.dt = ep.dt;
        for (const auto& f : ep.frames) executed.frames.push_back({f.root_pose, f.hand_contact});
        TrackingError te = rpe_roe(*reference, executed);
        m["rpe_m"] = te.rpe;
        m["roe_rad"] = te.roe;
        try {
            PhaseLag mpl = motion_phase_lag(*reference, executed, cfg.mpl_radius);
            m["mpl_s"] = mpl.mean_lag;
            m["mpl_frames"] = mpl.mean_lag / ep.dt;
            m["mpl_unreached"] = mpl.unreached;
        } catch (const std::exception& e) {
            m["mpl_error"] = e.what();
        }
        try {
            double cpl = contact_phase_lag(*reference, ep);
            m["cpl_s"] = cpl;
            m["cpl_frames"] = cpl / ep.dt;
        } catch (const std::exception& e) {
            m["cpl_error"] = e.what();
        }
    }
    return m;
}

int run(int argc, char** argv) {
    CLI::App app{"humanoid object-interaction planning and evaluation toolkit"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "config file (key = value or JSON)");
    app.add_option("--seed", g.seed, "PRNG seed")->default_val(0);
    app.add_option("--out", g.out_path, "output file (default: stdout)");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "build a timed reference trajectory")->fallthrough();
    std::string plan_map, plan_sidecar, plan_start = "0,0,0", plan_goal, plan_priors,
                plan_object, plan_profile;
    plan_cmd->add_option("--map", plan_map, "occupancy map (P5 PGM)");
    plan_cmd->add_option("--map-sidecar", plan_sidecar, "map sidecar JSON {origin, cell_size}");
    plan_cmd->add_option("--start", plan_start, "start x,y,psi");
    plan_cmd->add_option("--goal", plan_goal, "goal x,y,psi")->required();
    plan_cmd->add_option("--priors", plan_priors, "prior library JSON");
    plan_cmd->add_option("--object-pose", plan_object, "object pose JSON or @file");
    plan_cmd->add_option("--profile", plan_profile, "slow|middle|fast");

    // retrieve-prior
    auto* rp_cmd = app.add_subcommand("retrieve-prior", "nearest interaction prior and target pose")->fallthrough();
    std::string rp_priors, rp_object, rp_root;
    rp_cmd->add_option("--priors", rp_priors, "prior library JSON")->required();
    rp_cmd->add_option("--object-pose", rp_object, "object pose JSON or @file")->required();
    rp_cmd->add_option("--root-pose", rp_root, "root pose JSON or @file (default identity)");

    // monitor
    auto* mon_cmd = app.add_subcommand("monitor", "drop detection over a logged state stream")->fallthrough();
    std::string mon_stream, mon_region;
    int mon_window = 0;
    mon_cmd->add_option("--stream", mon_stream, "state stream JSONL")->required();
    mon_cmd->add_option("--region", mon_region, "safety region JSON or @file");
    mon_cmd->add_option("--window", mon_window, "consecutive out-of-region frames before alert");

    // predict-drop
    auto* pd_cmd = app.add_subcommand("predict-drop", "digital-twin resting pose prediction")->fallthrough();
    std::string pd_init, pd_vel, pd_params;
    pd_cmd->add_option("--init", pd_init, "initial pose JSON or @file")->required();
    pd_cmd->add_option("--vel", pd_vel, "velocity JSON {linear, angular} or @file")->required();
    pd_cmd->add_option("--params", pd_params, "twin parameter JSON or @file");

    // optimize-contact
    auto* oc_cmd = app.add_subcommand("optimize-contact", "penetration-loss clip refinement")->fallthrough();
    std::string oc_clip, oc_chain, oc_box;
    int oc_iters = 500;
    bool oc_clamp = false;
    double oc_vthresh = -1.0;
    oc_cmd->add_option("--clip", oc_clip, "motion clip JSON")->required();
    oc_cmd->add_option("--chain", oc_chain, "kinematic chain JSON")->required();
    oc_cmd->add_option("--box", oc_box, "object box full extents x,y,z");
    oc_cmd->add_option("--iters", oc_iters, "Adam iterations");
    oc_cmd->add_option("--v-threshold", oc_vthresh, "contact-phase speed threshold (m/s)");
    oc_cmd->add_flag("--clamp-outside", oc_clamp, "penalize only penetrating points");

    // evaluate
    auto* ev_cmd = app.add_subcommand("evaluate", "metrics over logged episodes")->fallthrough();
    std::string ev_episodes, ev_reference;
    ev_cmd->add_option("--episodes", ev_episodes, "episode JSONL file or directory")->required();
    ev_cmd->add_option("--reference", ev_reference, "reference trajectory JSONL");

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "out-of-distribution scenario lattice")->fallthrough();
    OodGridSpec grid_spec;
    std::string grid_yaws;
    grid_cmd->add_option("--x-min", grid_spec.x_min, "trapezoid x minimum (m)");
    grid_cmd->add_option("--x-max", grid_spec.x_max, "trapezoid x maximum (m)");
    grid_cmd->add_option("--spacing", grid_spec.spacing, "grid spacing (m)");
    grid_cmd->add_option("--yaws", grid_yaws, "object yaw set, degrees (comma separated)");
    grid_cmd->add_option("--target-radius", grid_spec.target_radius, "target circle radius (m)");
    grid_cmd->add_option("--target-step", grid_spec.target_step_deg, "target angle step (deg)");

    // pipeline
    auto* pl_cmd = app.add_subcommand("pipeline", "end-to-end scenario run")->fallthrough();
    std::string pl_object, pl_target, pl_scenarios;
    long pl_disturbance = -2;
    pl_cmd->add_option("--object-pose", pl_object, "object pose JSON or @file");
    pl_cmd->add_option("--target", pl_target, "placement target x,y");
    pl_cmd->add_option("--scenarios", pl_scenarios, "batch scenario JSON array or @file");
    pl_cmd->add_option("--disturbance-frame", pl_disturbance,
                       "inject a mid-carry kick at this frame (-1 disables)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kValidationError;
    }

    Config cfg = g.config();

    if (plan_cmd->parsed()) {
        OccupancyMap map = load_map_or_default(plan_map, plan_sidecar);
        auto gvals = parse_csv_doubles(plan_goal, 3, "--goal");
        auto svals = parse_csv_doubles(plan_start, 3, "--start");
        const VelocityLimits& lim =
            cfg.profile(plan_profile.empty() ? cfg.default_profile : plan_profile);
        if (plan_object.empty()) {
            // pure navigation: start -> goal, no contact span
            auto nav = plan_path(map, {svals[0], svals[1], svals[2]},
                                 {gvals[0], gvals[1], gvals[2]}, cfg.inflation_radius);
            auto poses = lift_waypoints(nav, cfg.h_stand);
            std::vector<TrajectoryFrame> seq;
            for (const auto& p : poses) seq.push_back({p, false});
            emit_trajectory(interpolate_trajectory(seq, lim, cfg.dt), g.out_path);
            return kOk;
        }
        if (plan_priors.empty())
            throw ConfigError("--object-pose requires --priors for target retrieval");
        PriorLibrary lib = io::load_priors(plan_priors);
        Pose object = io::pose_from_json(io::parse_inline(plan_object));
        Pose root{Vec3(svals[0], svals[1], cfg.h_stand), Rotation::from_yaw(svals[2])};
        RetrievalResult hit = lib.retrieve(root.inverse() * object, cfg.retrieval);
        Pose target = lib.target_pose(hit.index, root.inverse() * object, root);
        Pose end{Vec3(gvals[0], gvals[1], target.position.z()), Rotation::from_yaw(gvals[2])};
        auto nav = plan_path(map, {target.position.x(), target.position.y(),
                                   yaw_of(target.rotation)},
                             {gvals[0], gvals[1], gvals[2]}, cfg.inflation_radius);
        auto seq = build_sequence(root, target, end, lift_waypoints(nav, cfg.h_stand), cfg.h_stand);
        emit_trajectory(interpolate_trajectory(seq, lim, cfg.dt), g.out_path);
        return kOk;
    }

    if (rp_cmd->parsed()) {
        PriorLibrary lib = io::load_priors(rp_priors);
        Pose object = io::pose_from_json(io::parse_inline(rp_object));
        Pose root = rp_root.empty() ? Pose::identity()
                                    : io::pose_from_json(io::parse_inline(rp_root));
        RetrievalResult hit = lib.retrieve(object, cfg.retrieval);
        Pose target = lib.target_pose(hit.index, object, root);
        emit({{"k", hit.index},
              {"score", hit.score},
              {"clip_id", lib.entry(hit.index).source_clip_id},
              {"target_pose", io::to_json(target)}},
             g.out_path);
        return kOk;
    }

    if (mon_cmd->parsed()) {
        SafetyRegion region = mon_region.empty()
                                  ? cfg.monitor_region()
                                  : io::safety_region_from_json(io::parse_inline(mon_region));
        int window = mon_window > 0 ? mon_window : cfg.monitor_window;
        auto frames = io::load_state_stream(mon_stream);
        DropMonitor monitor(region, window);
        long alert = -1;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (monitor.update(frames[i]) == MonitorStatus::DropAlert && alert < 0)
                alert = static_cast<long>(i);
        }
        emit({{"alert_frame", alert},
              {"frames", frames.size()},
              {"window", window},
              {"region", io::to_json(region)}},
             g.out_path);
        return kOk;
    }

    if (pd_cmd->parsed()) {
        Pose init = io::pose_from_json(io::parse_inline(pd_init));
        json vj = io::parse_inline(pd_vel);
        VelocityEstimate vel;
        vel.linear = io::vec3_from_json(vj.at("linear"));
        vel.angular = io::vec3_from_json(vj.at("angular"));
        TwinParams params =
            pd_params.empty() ? cfg.twin : io::twin_params_from_json(io::parse_inline(pd_params));
        try {
            RestingPrediction pred = predict_resting_pose(init, vel, params);
            emit({{"resting_pose", io::to_json(pred.resting)},
                  {"settle_time_s", pred.settle_time}},
                 g.out_path);
            return kOk;
        } catch (const SettleTimeoutError& e) {
            emit({{"error", e.what()}, {"last_pose", io::to_json(e.last_pose)}}, g.out_path);
            return kStageFailure;
        }
    }

    if (oc_cmd->parsed()) {
        MotionClip clip = io::load_clip(oc_clip);
        KinematicChain chain = io::load_chain(oc_chain);
        Vec3 half = cfg.twin.box_half_extents;
        if (!oc_box.empty()) {
            auto b = parse_csv_doubles(oc_box, 3, "--box");
            half = 0.5 * Vec3(b[0], b[1], b[2]);
        }
        SdfField field = SdfField::analytic_box(half);
        ContactOptParams params;
        params.adam.iters = oc_iters;
        params.clamp_outside = oc_clamp;
        if (oc_vthresh > 0.0) params.v_threshold = oc_vthresh;
        ContactPhase phase = detect_contact_phase(clip, params.v_threshold);
        ContactOptResult result = optimize_contact(clip, chain, field, params);

        std::string clip_out = g.out_path.empty()
                                   ? std::filesystem::path(oc_clip).stem().string() + "_opt.json"
                                   : g.out_path;
        io::save_clip(result.clip, clip_out);
        std::string csv_out = std::filesystem::path(clip_out).replace_extension(".csv").string();
        std::ostringstream csv;
        csv << "iter,best_loss\n";
        for (std::size_t i = 0; i < result.loss_curve.size(); ++i)
            csv << i << "," << result.loss_curve[i] << "\n";
        io::write_text(csv_out, csv.str());
        std::cout << json({{"initial_loss", result.initial_loss},
                           {"final_loss", result.final_loss},
                           {"stalled", result.stalled},
                           {"phase", {phase.phi1, phase.phi2}},
                           {"clip_out", clip_out},
                           {"loss_csv", csv_out}})
                         .dump(2)
                  << "\n";
        return kOk;
    }

    if (ev_cmd->parsed()) {
        std::vector<std::string> files;
        if (std::filesystem::is_directory(ev_episodes)) {
            for (const auto& e : std::filesystem::directory_iterator(ev_episodes))
                if (e.path().extension() == ".jsonl") files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
        } else {
            files.push_back(ev_episodes);
        }
        if (files.empty()) throw ConfigError("no .jsonl episodes found in " + ev_episodes);
        TimedTrajectory reference;
        bool have_ref = !ev_reference.empty();
        if (have_ref) reference = io::load_trajectory(ev_reference);

        json per = json::array();
        std::size_t grasp_ok = 0, task_ok = 0;
        double pp_sum = 0.0, rpe_sum = 0.0, roe_sum = 0.0, mpl_sum = 0.0, cpl_sum = 0.0;
        std::size_t rpe_n = 0, mpl_n = 0, cpl_n = 0;
        for (const auto& path : files) {
            Episode ep = io::load_episode(path);
            json m = episode_metrics(ep, have_ref ? &reference : nullptr, cfg);
            m["episode"] = path;
            grasp_ok += m["grasp_success"].get<bool>() ? 1 : 0;
            task_ok += m["task_success"].get<bool>() ? 1 : 0;
            pp_sum += m["placement_precision_m"].get<double>();
            if (m.contains("rpe_m")) {
                rpe_sum += m["rpe_m"].get<double>();
                roe_sum += m["roe_rad"].get<double>();
                ++rpe_n;
            }
            if (m.contains("mpl_s")) {
                mpl_sum += m["mpl_s"].get<double>();
                ++mpl_n;
            }
            if (m.contains("cpl_s")) {
                cpl_sum += m["cpl_s"].get<double>();
                ++cpl_n;
            }
            per.push_back(m);
        }
        double n = static_cast<double>(files.size());
        json agg = {{"episodes", files.size()},
                    {"grasp_success_rate", grasp_ok / n},
                    {"task_success_rate", task_ok / n},
                    {"mean_placement_precision_m", pp_sum / n}};
        if (rpe_n > 0) {
            agg["mean_rpe_m"] = rpe_sum / rpe_n;
            agg["mean_roe_rad"] = roe_sum / rpe_n;
        }
        if (mpl_n > 0) agg["mean_mpl_s"] = mpl_sum / mpl_n;
        if (cpl_n > 0) agg["mean_cpl_s"] = cpl_sum / cpl_n;
        json report = {{"per_episode", per}, {"aggregate", agg}};
        emit(report, g.out_path);

        if (!g.out_path.empty()) {
            std::ostringstream csv;
            csv << "episode,grasp_success,task_success,placement_precision_m,rpe_m,roe_rad,"
                   "mpl_s,cpl_s\n";
            for (const auto& m : per) {
                auto opt = [&m](const char* key) {
                    return m.contains(key) ? m[key].dump() : std::string{};
                };
                csv << m["episode"].get<std::string>() << ","
                    << (m["grasp_success"].get<bool>() ? 1 : 0) << ","
                    << (m["task_success"].get<bool>() ? 1 : 0) << ","
                    << m["placement_precision_m"].get<double>() << "," << opt("rpe_m") << ","
                    << opt("roe_rad") << "," << opt("mpl_s") << "," << opt("cpl_s") << "\n";
            }
            io::write_text(
                std::filesystem::path(g.out_path).replace_extension(".csv").string(), csv.str());
        }
        return kOk;
    }

    if (grid_cmd->parsed()) {
        if (!grid_yaws.empty()) {
            std::string body = grid_yaws;
            std::replace(body.begin(), body.end(), ',', ' ');
            std::istringstream ss(body);
            grid_spec.yaw_set_deg.clear();
            double v;
            while (ss >> v) grid_spec.yaw_set_deg.push_back(v);
            if (grid_spec.yaw_set_deg.empty()) throw ConfigError("--yaws: no values parsed");
        }
        OodGrid grid = generate_ood_grid(grid_spec);
        json report = {{"grid_points", grid.grid_points},
                       {"yaw_count", grid.yaw_count},
                       {"target_count", grid.target_count},
                       {"total_scenarios", grid.scenarios.size()}};
        if (grid.grid_points == 60 && grid.yaw_count == 4 && grid.target_count == 36) {
            report["note"] =
                "enumeration yields 8640 scenarios (60 x 4 x 36); the previously reported "
                "total of 5756 does not factor from these grid parameters, so the discrepancy "
                "is surfaced here rather than reconciled";
        }
        if (!g.out_path.empty()) {
            json scen = json::array();
            for (const auto& s : grid.scenarios)
                scen.push_back({{"object_pose", io::to_json(s.object_pose)},
                                {"target_position", io::to_json(s.target_position)}});
            report["scenarios"] = scen;
        }
        emit(report, g.out_path);
        if (!g.out_path.empty()) {
            report.erase("scenarios");
            std::cout << report.dump(2) << "\n";
        }
        return kOk;
    }

    if (pl_cmd->parsed()) {
        if (pl_disturbance != -2) cfg.disturbance_frame = pl_disturbance;
        if (!pl_scenarios.empty()) {
            json arr = io::parse_inline(pl_scenarios);
            if (!arr.is_array()) throw ConfigError("--scenarios must be a JSON array");
            std::vector<Scenario> scenarios;
            for (const auto& sj : arr) {
                Scenario s;
                s.object_pose = io::pose_from_json(sj.at("object_pose"));
                s.target_position = io::vec3_from_json(sj.at("target_position"));
                scenarios.push_back(s);
            }
            emit(run_pipeline_batch(scenarios, cfg, g.seed), g.out_path);
            return kOk;
        }
        Scenario s;
        if (!pl_object.empty()) s.object_pose = io::pose_from_json(io::parse_inline(pl_object));
        else s.object_pose = {Vec3(1.0, 0.0, 0.0), Rotation::identity()};
        if (!pl_target.empty()) {
            auto t = parse_csv_doubles(pl_target, 2, "--target");
            s.target_position = Vec3(t[0], t[1], 0.0);
        } else {
            s.target_position = Vec3(4.0, 0.0, 0.0);
        }
        json report = run_pipeline(s, cfg, g.seed);
        emit(report, g.out_path);
        if (report.contains("error")) return kStageFailure;
        return kOk;
    }

    return kValidationError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const InvalidEndpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const NoPriorsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kStageFailure;
    }
}
