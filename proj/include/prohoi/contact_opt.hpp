#pragma once

#include <string>
#include <vector>

#include "prohoi/kinematics.hpp"
#include "prohoi/sdf.hpp"
#include "prohoi/se3.hpp"

namespace prohoi {

struct ClipFrame {
    Pose root_pose;
    std::vector<double> joint_angles;
    Pose object_pose;
};

struct MotionClip {
    double fps = 50.0;
    std::string chain_id;
    std::vector<ClipFrame> frames;
};

struct ContactPhase {
    std::size_t phi1 = 0;
    std::size_t phi2 = 0;
};

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int iters = 500;
};

struct ContactOptParams {
    AdamParams adam;
    double v_threshold = 0.05;   // m/s, contact-phase detection
    bool clamp_outside = false;  // penetration-only loss when true
    double fd_step = 1e-4;       // rad, central-difference step
    int stall_iters = 50;        // consecutive non-improving iters before giving up
};

struct ContactOptResult {
    MotionClip clip;                 // best iterate
    std::vector<double> loss_curve;  // running best loss per iteration
    double initial_loss = 0.0;
    double final_loss = 0.0;
    bool stalled = false;
};

// Maximal interval of interior frames whose object linear speed (central
// finite difference) exceeds the threshold. Throws NoContactPhaseError.
ContactPhase detect_contact_phase(const MotionClip& clip, double v_threshold);

// Sum over the contact phase of |sdf(p)| for every hand sample point, with p
// expressed in the object frame. clamp_outside counts only penetrating points.
double penetration_loss(const MotionClip& clip, const KinematicChain& chain, const SdfField& field,
                        const ContactPhase& phase, bool clamp_outside);

// Adam on the upper-body joint angles of the contact-phase frames, gradients
// by central finite differences, joint limits enforced by projection. Frames
// outside the phase and non-upper-body joints are never touched.
ContactOptResult optimize_contact(const MotionClip& clip, const KinematicChain& chain,
                                  const SdfField& field, const ContactOptParams& params);

}  // namespace prohoi
