#include "prohoi/io.hpp"

#include <fstream>
#include <sstream>

#include "prohoi/errors.hpp"

namespace prohoi::io {

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Pose& p) {
    const Quat& q = p.rotation.quaternion();
    return {{"position", to_json(p.position)}, {"rotation", {q.w(), q.x(), q.y(), q.z()}}};
}

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pose pose_from_json(const json& j) {
    Pose p;
    p.position = vec3_from_json(j.at("position"));
    const json& r = j.at("rotation");
    if (!r.is_array() || r.size() != 4) throw ConfigError("rotation must be a quaternion [w,x,y,z]");
    Quat q(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>());
    if (std::abs(q.norm() - 1.0) > 1e-6) throw ConfigError("quaternion is not unit length");
    p.rotation = Rotation::from_quaternion(q);
    return p;
}

json to_json(const PriorEntry& e) {
    return {{"clip_id", e.source_clip_id},
            {"object_pose", to_json(e.object_pose)},
            {"interaction_pose", to_json(e.interaction_pose)}};
}

PriorEntry prior_entry_from_json(const json& j) {
    return {pose_from_json(j.at("object_pose")), pose_from_json(j.at("interaction_pose")),
            j.value("clip_id", std::string{})};
}

PriorLibrary load_priors(const std::string& path) {
    json j = parse_file(path);
    if (!j.is_array()) throw ConfigError("prior file must be a JSON array: " + path);
    PriorLibrary lib;
    for (const auto& e : j) lib.add(prior_entry_from_json(e));
    return lib;
}

void save_priors(const PriorLibrary& lib, const std::string& path) {
    json arr = json::array();
    for (const auto& e : lib.entries()) arr.push_back(to_json(e));
    write_text(path, arr.dump(2) + "\n");
}

void save_trajectory(const TimedTrajectory& traj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write trajectory: " + path);
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
        json line = {{"t", traj.time_of(i)},
                     {"pose", to_json(traj.frames[i].pose)},
                     {"contact", traj.frames[i].contact}};
        f << line.dump() << "\n";
    }
}

TimedTrajectory load_trajectory(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open trajectory: " + path);
    TimedTrajectory traj;
    std::string line;
    double prev_t = 0.0;
    bool first = true, second = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        double t = j.at("t").get<double>();
        if (first) {
            first = false;
        } else if (second) {
            traj.dt = t - prev_t;
            second = false;
        }
        prev_t = t;
        traj.frames.push_back({pose_from_json(j.at("pose")), j.at("contact").get<bool>()});
    }
    return traj;
}

json to_json(const StateFrame& f) {
    json j = {{"t", f.t},
              {"root_pose", to_json(f.root_pose)},
              {"object_pose_rel", to_json(f.object_pose_rel)},
              {"contact_cmd", f.contact_cmd}};
    if (f.hand_contact) j["hand_contact"] = *f.hand_contact;
    return j;
}

StateFrame state_frame_from_json(const json& j) {
    StateFrame f;
    f.t = j.at("t").get<double>();
    f.root_pose = pose_from_json(j.at("root_pose"));
    f.object_pose_rel = pose_from_json(j.at("object_pose_rel"));
    f.contact_cmd = j.at("contact_cmd").get<bool>();
    if (j.contains("hand_contact")) f.hand_contact = j["hand_contact"].get<bool>();
    return f;
}

std::vector<StateFrame> load_state_stream(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open state stream: " + path);
    std::vector<StateFrame> frames;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        frames.push_back(state_frame_from_json(json::parse(line)));
    }
    return frames;
}

void save_state_stream(const std::vector<StateFrame>& frames, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write state stream: " + path);
    for (const auto& fr : frames) f << to_json(fr).dump() << "\n";
}

SafetyRegion safety_region_from_json(const json& j) {
    SafetyRegion r;
    if (j.contains("center")) r.center = vec3_from_json(j["center"]);
    if (j.contains("half_extents")) r.half_extents = vec3_from_json(j["half_extents"]);
    if ((r.half_extents.array() <= 0.0).any())
        throw ConfigError("safety region half extents must be positive");
    return r;
}

json to_json(const SafetyRegion& r) {
    return {{"center", to_json(r.center)}, {"half_extents", to_json(r.half_extents)}};
}

TwinParams twin_params_from_json(const json& j) {
    TwinParams p;
    if (j.contains("gravity")) p.gravity = j["gravity"].get<double>();
    if (j.contains("restitution")) p.restitution = j["restitution"].get<double>();
    if (j.contains("friction")) p.friction = j["friction"].get<double>();
    if (j.contains("box_half_extents")) p.box_half_extents = vec3_from_json(j["box_half_extents"]);
    if (j.contains("mass_scale")) p.mass_scale = j["mass_scale"].get<double>();
    if (j.contains("sim_dt")) p.sim_dt = j["sim_dt"].get<double>();
    if (j.contains("settle_lin_eps")) p.settle_lin_eps = j["settle_lin_eps"].get<double>();
    if (j.contains("settle_ang_eps")) p.settle_ang_eps = j["settle_ang_eps"].get<double>();
    if (j.contains("settle_frames")) p.settle_frames = j["settle_frames"].get<int>();
    if (j.contains("max_sim_time")) p.max_sim_time = j["max_sim_time"].get<double>();
    p.validate();
    return p;
}

json to_json(const TwinParams& p) {
    return {{"gravity", p.gravity},
            {"restitution", p.restitution},
            {"friction", p.friction},
            {"box_half_extents", to_json(p.box_half_extents)},
            {"mass_scale", p.mass_scale},
            {"sim_dt", p.sim_dt},
            {"settle_lin_eps", p.settle_lin_eps},
            {"settle_ang_eps", p.settle_ang_eps},
            {"settle_frames", p.settle_frames},
            {"max_sim_time", p.max_sim_time}};
}

Episode load_episode(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open episode: " + path);
    Episode ep;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (!have_header) {
            ep.dt = j.at("dt").get<double>();
            ep.goal_position = vec3_from_json(j.at("goal_position"));
            have_header = true;
            continue;
        }
        EpisodeFrame frame;
        frame.root_pose = pose_from_json(j.at("root_pose"));
        frame.object_pose = pose_from_json(j.at("object_pose"));
        frame.contact_cmd = j.value("contact_cmd", false);
        frame.hand_contact = j.value("hand_contact", false);
        ep.frames.push_back(frame);
    }
    if (!have_header) throw ConfigError("episode file missing header line: " + path);
    return ep;
}

void save_episode(const Episode& ep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write episode: " + path);
    json header = {{"dt", ep.dt}, {"goal_position", to_json(ep.goal_position)}};
    f << header.dump() << "\n";
    for (const auto& fr : ep.frames) {
        json j = {{"root_pose", to_json(fr.root_pose)},
                  {"object_pose", to_json(fr.object_pose)},
                  {"contact_cmd", fr.contact_cmd},
                  {"hand_contact", fr.hand_contact}};
        f << j.dump() << "\n";
    }
}

MotionClip load_clip(const std::string& path) {
    json j = parse_file(path);
    MotionClip clip;
    clip.fps = j.at("fps").get<double>();
    clip.chain_id = j.value("chain_id", std::string{});
    for (const auto& fj : j.at("frames")) {
        ClipFrame frame;
        frame.root_pose = pose_from_json(fj.at("root_pose"));
        frame.joint_angles = fj.at("joint_angles").get<std::vector<double>>();
        frame.object_pose = pose_from_json(fj.at("object_pose"));
        clip.frames.push_back(std::move(frame));
    }
    return clip;
}

void save_clip(const MotionClip& clip, const std::string& path) {
    json frames = json::array();
    for (const auto& fr : clip.frames) {
        frames.push_back({{"root_pose", to_json(fr.root_pose)},
                          {"joint_angles", fr.joint_angles},
                          {"object_pose", to_json(fr.object_pose)}});
    }
    json j = {{"fps", clip.fps}, {"chain_id", clip.chain_id}, {"frames", frames}};
    write_text(path, j.dump(2) + "\n");
}

KinematicChain load_chain(const std::string& path) {
    json j = parse_file(path);
    std::vector<Joint> joints;
    for (const auto& jj : j.at("joints")) {
        Joint joint;
        joint.name = jj.at("name").get<std::string>();
        joint.parent = jj.at("parent").get<int>();
        joint.offset = pose_from_json(jj.at("offset"));
        joint.axis = vec3_from_json(jj.at("axis"));
        joint.lower = jj.at("limits").at(0).get<double>();
        joint.upper = jj.at("limits").at(1).get<double>();
        joints.push_back(std::move(joint));
    }
    std::vector<EndFrame> ends;
    for (const auto& ej : j.at("end_frames")) {
        EndFrame e;
        e.name = ej.at("name").get<std::string>();
        e.joint = ej.at("joint").get<int>();
        e.offset = ej.contains("offset") ? pose_from_json(ej["offset"]) : Pose::identity();
        for (const auto& pj : ej.at("points")) e.points.push_back(vec3_from_json(pj));
        ends.push_back(std::move(e));
    }
    std::vector<int> upper = j.at("upper_body_indices").get<std::vector<int>>();
    return KinematicChain(std::move(joints), std::move(ends), std::move(upper));
}

void save_chain(const KinematicChain& chain, const std::string& path) {
    json joints = json::array();
    for (const auto& joint : chain.joints()) {
        joints.push_back({{"name", joint.name},
                          {"parent", joint.parent},
                          {"offset", to_json(joint.offset)},
                          {"axis", to_json(joint.axis)},
                          {"limits", {joint.lower, joint.upper}}});
    }
    json ends = json::array();
    for (const auto& e : chain.end_frames()) {
        json points = json::array();
        for (const auto& p : e.points) points.push_back(to_json(p));
        ends.push_back({{"name", e.name},
                        {"joint", e.joint},
                        {"offset", to_json(e.offset)},
                        {"points", points}});
    }
    json j = {{"joints", joints},
              {"end_frames", ends},
              {"upper_body_indices", chain.upper_body_indices()}};
    write_text(path, j.dump(2) + "\n");
}

json parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open file: " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error in " + path + ": " + e.what());
    }
}

json parse_inline(const std::string& text) {
    if (!text.empty() && text[0] == '@') return parse_file(text.substr(1));
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid inline JSON: ") + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write file: " + path);
    f << text;
}

}  // namespace prohoi::io
