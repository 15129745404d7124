#include "prohoi/box_twin.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "prohoi/errors.hpp"

namespace prohoi {

void TwinParams::validate() const {
    if (restitution < 0.0 || restitution > 1.0) throw ConfigError("restitution must be in [0, 1]");
    if (friction < 0.0) throw ConfigError("friction must be nonnegative");
    if (sim_dt <= 0.0) throw ConfigError("sim_dt must be positive");
    if ((box_half_extents.array() <= 0.0).any()) throw ConfigError("box half extents must be positive");
    if (mass_scale <= 0.0) throw ConfigError("mass_scale must be positive");
}

namespace {

constexpr double kSlop = 1e-4;          // penetration tolerated without push-out
constexpr double kBaumgarte = 0.2;      // fraction of excess penetration removed per step
constexpr double kRestitutionVel = 1e-3;  // approach speed below which restitution is off

Mat3 body_inertia(const TwinParams& p) {
    double m = p.mass_scale;
    Vec3 e = 2.0 * p.box_half_extents;  // full extents
    return (m / 12.0) *
           Vec3(e.y() * e.y() + e.z() * e.z(), e.x() * e.x() + e.z() * e.z(),
                e.x() * e.x() + e.y() * e.y())
               .asDiagonal();
}

std::array<Vec3, 8> body_corners(const Vec3& h) {
    return {Vec3(h.x(), h.y(), h.z()),   Vec3(-h.x(), h.y(), h.z()),
            Vec3(h.x(), -h.y(), h.z()),  Vec3(-h.x(), -h.y(), h.z()),
            Vec3(h.x(), h.y(), -h.z()),  Vec3(-h.x(), h.y(), -h.z()),
            Vec3(h.x(), -h.y(), -h.z()), Vec3(-h.x(), -h.y(), -h.z())};
}

}  // namespace

void twin_step(TwinState& state, const TwinParams& params) {
    const double dt = params.sim_dt;
    const double m = params.mass_scale;
    const double inv_m = 1.0 / m;
    const Mat3 rot = state.pose.rotation.matrix();
    const Mat3 inv_inertia_world =
        rot * body_inertia(params).inverse() * rot.transpose();

    state.linear_velocity.z() -= params.gravity * dt;

    const auto corners = body_corners(params.box_half_extents);
    std::array<Vec3, 8> r;       // corner offsets from the center, world frame
    std::array<double, 8> z;     // corner heights
    std::array<double, 8> bias;  // restitution target velocity
    std::array<double, 8> jn_acc{};
    std::array<Eigen::Vector2d, 8> jt_acc;
    for (int i = 0; i < 8; ++i) {
        r[i] = rot * corners[i];
        z[i] = state.pose.position.z() + r[i].z();
        double un0 = (state.linear_velocity + state.angular_velocity.cross(r[i])).z();
        bool impacting = z[i] + un0 * dt < 0.0 && un0 < -kRestitutionVel;
        // non-impacting corners impose no velocity floor at all
        bias[i] = impacting ? -params.restitution * un0
                            : -std::numeric_limits<double>::infinity();
        jt_acc[i].setZero();
    }

    const Vec3 n = Vec3::UnitZ();
    for (int iter = 0; iter < params.solver_iterations; ++iter) {
        for (int i = 0; i < 8; ++i) {
            Vec3 u = state.linear_velocity + state.angular_velocity.cross(r[i]);

            // Target outgoing normal velocity: an airborne corner may fall at
            // most down to the ground within this step; a resting or
            // penetrating corner must not move further down; an impacting
            // corner bounces per restitution. Never above zero except for
            // restitution, so the solve cannot add energy.
            double positional = z[i] > 0.0 ? -z[i] / dt : 0.0;
            double target = std::max(bias[i], positional);

            Vec3 rxn = r[i].cross(n);
            double k_n = inv_m + rxn.dot(inv_inertia_world * rxn);
            double j_new = std::max(0.0, jn_acc[i] + (target - u.z()) / k_n);
            double dj = j_new - jn_acc[i];
            jn_acc[i] = j_new;
            if (dj != 0.0) {
                state.linear_velocity += dj * inv_m * n;
                state.angular_velocity += inv_inertia_world * (rxn * dj);
            }
            if (jn_acc[i] <= 0.0 || params.friction <= 0.0) continue;

            u = state.linear_velocity + state.angular_velocity.cross(r[i]);
            Eigen::Vector2d ut = u.head<2>();
            double speed = ut.norm();
            if (speed < 1e-12) continue;
            Vec3 t(ut.x() / speed, ut.y() / speed, 0.0);
            Vec3 rxt = r[i].cross(t);
            double k_t = inv_m + rxt.dot(inv_inertia_world * rxt);
            Eigen::Vector2d jt_new = jt_acc[i] - (speed / k_t) * ut.normalized();
            double max_jt = params.friction * jn_acc[i];
            if (jt_new.norm() > max_jt) jt_new *= max_jt / jt_new.norm();
            Eigen::Vector2d djt = jt_new - jt_acc[i];
            jt_acc[i] = jt_new;
            Vec3 impulse(djt.x(), djt.y(), 0.0);
            state.linear_velocity += impulse * inv_m;
            state.angular_velocity += inv_inertia_world * r[i].cross(impulse);
        }
    }

    state.pose.position += state.linear_velocity * dt;
    state.pose.rotation = exp_map(state.angular_velocity * dt) * state.pose.rotation;

    // Split-impulse position correction: excess penetration is removed by
    // pseudo-velocities that displace the pose but never enter the stored
    // velocities, so the correction cannot feed energy into the motion.
    Vec3 pv = Vec3::Zero(), pw = Vec3::Zero();
    std::array<double, 8> jp_acc{};
    bool any = false;
    for (int i = 0; i < 8; ++i)
        if (z[i] < -kSlop) any = true;
    if (any) {
        for (int iter = 0; iter < params.solver_iterations; ++iter) {
            for (int i = 0; i < 8; ++i) {
                double depth = -z[i] - kSlop;
                if (depth <= 0.0) continue;
                double target = kBaumgarte * depth / dt;
                double up = (pv + pw.cross(r[i])).z();
                Vec3 rxn = r[i].cross(n);
                double k_n = inv_m + rxn.dot(inv_inertia_world * rxn);
                double j_new = std::max(0.0, jp_acc[i] + (target - up) / k_n);
                double dj = j_new - jp_acc[i];
                jp_acc[i] = j_new;
                pv += dj * inv_m * n;
                pw += inv_inertia_world * (rxn * dj);
            }
        }
        state.pose.position += pv * dt;
        state.pose.rotation = exp_map(pw * dt) * state.pose.rotation;
    }
}

double twin_energy(const TwinState& state, const TwinParams& params) {
    const Mat3 rot = state.pose.rotation.matrix();
    const Mat3 inertia_world = rot * body_inertia(params) * rot.transpose();
    return 0.5 * params.mass_scale * state.linear_velocity.squaredNorm() +
           0.5 * state.angular_velocity.dot(inertia_world * state.angular_velocity) +
           params.mass_scale * params.gravity * state.pose.position.z();
}

RestingPrediction predict_resting_pose(const Pose& init, const VelocityEstimate& vel,
                                       const TwinParams& params) {
    params.validate();
    double lowest = init.position.z();
    for (const Vec3& c : body_corners(params.box_half_extents))
        lowest = std::min(lowest, init.position.z() + (init.rotation * c).z());
    if (lowest < -params.box_half_extents.minCoeff())
        throw DomainError("initial pose intersects the ground by more than a half extent");

    TwinState state{init, vel.linear, vel.angular};
    int calm_steps = 0;
    const auto max_steps = static_cast<long>(std::ceil(params.max_sim_time / params.sim_dt));
    for (long step = 0; step < max_steps; ++step) {
        twin_step(state, params);
        bool calm = state.linear_velocity.norm() < params.settle_lin_eps &&
                    state.angular_velocity.norm() < params.settle_ang_eps;
        calm_steps = calm ? calm_steps + 1 : 0;
        if (calm_steps >= params.settle_frames)
            return {state.pose, static_cast<double>(step + 1) * params.sim_dt};
    }
    throw SettleTimeoutError(state.pose,
                             VelocityEstimate{state.linear_velocity, state.angular_velocity});
}

}  // namespace prohoi
