#pragma once

#include "prohoi/drop_monitor.hpp"
#include "prohoi/se3.hpp"

namespace prohoi {

// Parameters of the rigid-box digital twin. Ground is the z = 0 plane;
// a convex robot-hull collision shape is a possible future extension and
// deliberately absent from the state update.
struct TwinParams {
    double gravity = 9.81;  // magnitude, acting along -z
    double restitution = 0.0;
    double friction = 0.6;
    Vec3 box_half_extents{0.15, 0.1, 0.125};
    double mass_scale = 1.0;
    double sim_dt = 1e-3;
    double settle_lin_eps = 0.01;   // m/s
    double settle_ang_eps = 0.05;   // rad/s
    int settle_frames = 50;
    double max_sim_time = 5.0;
    int solver_iterations = 10;

    void validate() const;
};

struct RestingPrediction {
    Pose resting;
    double settle_time = 0.0;
};

// Thrown when the box is still moving at max_sim_time; carries the state
// reached so a caller can still aim the gaze at something.
struct SettleTimeoutError : std::runtime_error {
    Pose last_pose;
    VelocityEstimate last_velocity;
    explicit SettleTimeoutError(Pose pose, VelocityEstimate vel)
        : std::runtime_error("digital twin did not settle within max_sim_time"),
          last_pose(std::move(pose)), last_velocity(vel) {}
};

// Semi-implicit Euler rigid-box drop against the ground plane. Contacts are
// resolved with sequential impulses at the 8 corners (restitution + Coulomb
// friction); the normal impulse targets a post-step corner height >= 0 so
// penetration is prevented rather than corrected after the fact.
RestingPrediction predict_resting_pose(const Pose& init, const VelocityEstimate& vel,
                                       const TwinParams& params);

// One integration step, exposed for energy-budget checks.
struct TwinState {
    Pose pose;
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();  // world frame
};

void twin_step(TwinState& state, const TwinParams& params);

// Kinetic + gravitational potential energy of the state (J).
double twin_energy(const TwinState& state, const TwinParams& params);

}  // namespace prohoi
