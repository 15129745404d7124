#pragma once

#include <map>
#include <string>

#include "prohoi/box_twin.hpp"
#include "prohoi/drop_monitor.hpp"
#include "prohoi/metrics.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/prior_library.hpp"

namespace prohoi {

// Runtime configuration with documented defaults. Loaded from a key = value
// text file (dotted keys, '#' comments) or a JSON object; unknown keys are
// rejected, referenced files must exist.
struct Config {
    double h_stand = 0.75;  // m, nominal pelvis height
    double dt = 0.02;       // s, 50 Hz control rate

    std::map<std::string, VelocityLimits> profiles = {
        {"slow", {0.2, 0.6}}, {"middle", {0.4, 1.0}}, {"fast", {0.6, 1.3}}};
    std::string default_profile = "middle";

    RetrievalWeights retrieval;

    SafetyRegion safety_region;
    // Prism vertical offset in the base frame. Covers both the squat descent
    // (box ~0.62 m below the base) and the carry (~0.33 m below).
    double monitor_center_z = -0.47;
    int monitor_window = 10;

    TwinParams twin;
    RewardConfig reward;

    double grasp_h_lift = 0.1;
    double grasp_t_hold = 1.0;
    double task_tolerance = 0.1;
    double mpl_radius = 0.05;

    // pipeline / follower
    double follower_noise = 0.005;    // m, bounded additive position noise
    double follower_delay = 0.0;      // s
    long disturbance_frame = -1;      // executed-frame index, -1 disables
    Vec3 disturbance_linear{0.6, 0.8, 0.3};   // m/s kick applied to the box
    Vec3 disturbance_angular{1.0, 0.5, 0.3};  // rad/s
    double inflation_radius = 0.2;    // m, obstacle inflation
    double gaze_standoff = 0.8;       // m
    double camera_fov_h = 1.0;        // rad

    // file paths (optional)
    std::string priors_path;
    std::string map_path;
    std::string map_sidecar_path;
    std::string chain_path;

    const VelocityLimits& profile(const std::string& name) const;

    // Effective drop-monitor region: configured prism shifted to the
    // configured vertical center.
    SafetyRegion monitor_region() const;

    static Config load(const std::string& path);
    static Config from_key_values(const std::map<std::string, std::string>& kv);
};

}  // namespace prohoi
