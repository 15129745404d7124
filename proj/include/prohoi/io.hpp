#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "prohoi/box_twin.hpp"
#include "prohoi/contact_opt.hpp"
#include "prohoi/drop_monitor.hpp"
#include "prohoi/kinematics.hpp"
#include "prohoi/metrics.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/prior_library.hpp"

namespace prohoi::io {

using nlohmann::json;

// Pose on the wire: {"position":[x,y,z], "rotation":[w,x,y,z]} (unit quaternion).
json to_json(const Vec3& v);
json to_json(const Pose& p);
Vec3 vec3_from_json(const json& j);
Pose pose_from_json(const json& j);

json to_json(const PriorEntry& e);
PriorEntry prior_entry_from_json(const json& j);

// Prior file: JSON array of {clip_id, object_pose, interaction_pose}.
PriorLibrary load_priors(const std::string& path);
void save_priors(const PriorLibrary& lib, const std::string& path);

// Trajectory file: JSON Lines, one frame per line {t, pose, contact}.
void save_trajectory(const TimedTrajectory& traj, const std::string& path);
TimedTrajectory load_trajectory(const std::string& path);

json to_json(const StateFrame& f);
StateFrame state_frame_from_json(const json& j);

// State stream: JSON Lines of StateFrame.
std::vector<StateFrame> load_state_stream(const std::string& path);
void save_state_stream(const std::vector<StateFrame>& frames, const std::string& path);

SafetyRegion safety_region_from_json(const json& j);
json to_json(const SafetyRegion& r);

TwinParams twin_params_from_json(const json& j);
json to_json(const TwinParams& p);

// Episode file: JSON Lines; header {dt, goal_position} then one frame per line.
Episode load_episode(const std::string& path);
void save_episode(const Episode& ep, const std::string& path);

// Motion clip: JSON {fps, chain_id, frames:[{root_pose, joint_angles, object_pose}]}.
MotionClip load_clip(const std::string& path);
void save_clip(const MotionClip& clip, const std::string& path);

// Chain file: JSON {joints, end_frames, upper_body_indices}.
KinematicChain load_chain(const std::string& path);
void save_chain(const KinematicChain& chain, const std::string& path);

json parse_file(const std::string& path);
json parse_inline(const std::string& text);  // literal JSON or @file reference
void write_text(const std::string& path, const std::string& text);

}  // namespace prohoi::io
