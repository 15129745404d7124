#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "prohoi/contact_opt.hpp"
#include "prohoi/errors.hpp"
#include "prohoi/kinematics.hpp"
#include "prohoi/rng.hpp"
#include "prohoi/sdf.hpp"
#include "test_util.hpp"

using namespace prohoi;

namespace {

KinematicChain one_dof_chain(const Vec3& point) {
    Joint j;
    j.name = "j0";
    j.parent = -1;
    j.axis = Vec3::UnitZ();
    EndFrame hand;
    hand.name = "hand";
    hand.joint = 0;
    hand.points = {point};
    return KinematicChain({j}, {hand}, {0});
}

MotionClip moving_clip(std::size_t n_frames, std::size_t dof, const Vec3& object_start,
                       const Vec3& object_step) {
    MotionClip clip;
    clip.fps = 50.0;
    for (std::size_t t = 0; t < n_frames; ++t) {
        ClipFrame f;
        f.joint_angles.assign(dof, 0.0);
        f.object_pose.position = object_start + static_cast<double>(t) * object_step;
        clip.frames.push_back(f);
    }
    return clip;
}

}  // namespace

TEST_CASE("detect_contact_phase") {
    SUBCASE("static object has no contact phase") {
        MotionClip clip = moving_clip(30, 1, Vec3(1, 0, 0), Vec3::Zero());
        CHECK_THROWS_AS(detect_contact_phase(clip, 0.05), NoContactPhaseError);
    }

    SUBCASE("motion window frames 10..40 at 0.3 m/s") {
        MotionClip clip = moving_clip(60, 1, Vec3::Zero(), Vec3::Zero());
        const double step = 0.3 / clip.fps;
        for (std::size_t t = 10; t < clip.frames.size(); ++t) {
            double moved = step * (std::min<std::size_t>(t, 40) - 10);
            clip.frames[t].object_pose.position = Vec3(moved, 0, 0);
        }
        ContactPhase phase = detect_contact_phase(clip, 0.05);
        CHECK(phase.phi1 >= 9);
        CHECK(phase.phi1 <= 11);
        CHECK(phase.phi2 >= 39);
        CHECK(phase.phi2 <= 41);
    }

    SUBCASE("threshold zero on a moving clip selects all interior frames") {
        MotionClip clip = moving_clip(20, 1, Vec3::Zero(), Vec3(0.01, 0, 0));
        ContactPhase phase = detect_contact_phase(clip, 0.0);
        CHECK(phase.phi1 == 1);
        CHECK(phase.phi2 == 18);
    }

    SUBCASE("too-short clip") {
        MotionClip clip = moving_clip(1, 1, Vec3::Zero(), Vec3::Zero());
        CHECK_THROWS_AS(detect_contact_phase(clip, 0.05), DomainError);
    }
}

TEST_CASE("penetration_loss") {
    SdfField box = SdfField::analytic_box(Vec3(0.5, 0.5, 0.5));

    SUBCASE("hand points exactly on the box surface give zero loss") {
        Joint j;
        j.parent = -1;
        EndFrame hand;
        hand.joint = 0;
        hand.points = {Vec3(0.5, 0, 0), Vec3(0, 0.5, 0), Vec3(-0.5, 0, 0.25)};
        KinematicChain chain({j}, {hand}, {0});
        MotionClip clip = moving_clip(3, 1, Vec3::Zero(), Vec3::Zero());
        CHECK(penetration_loss(clip, chain, box, {0, 2}, false) == doctest::Approx(0.0));
    }

    SUBCASE("single point at the box center for one frame") {
        KinematicChain chain = one_dof_chain(Vec3::Zero());
        MotionClip clip = moving_clip(1, 1, Vec3::Zero(), Vec3::Zero());
        CHECK(penetration_loss(clip, chain, box, {0, 0}, true) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(penetration_loss(clip, chain, box, {0, 0}, false) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("clamp_outside drops non-penetrating points; |phi| keeps them") {
        KinematicChain chain = one_dof_chain(Vec3(1.5, 0, 0));  // 1 m outside
        MotionClip clip = moving_clip(1, 1, Vec3::Zero(), Vec3::Zero());
        CHECK(penetration_loss(clip, chain, box, {0, 0}, true) == doctest::Approx(0.0));
        CHECK(penetration_loss(clip, chain, box, {0, 0}, false) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("matches a naive point-by-point oracle on random clips") {
        Rng rng(71);
        Joint j0;
        j0.parent = -1;
        j0.axis = Vec3::UnitZ();
        Joint j1;
        j1.parent = 0;
        j1.offset.position = Vec3(0.4, 0, 0);
        j1.axis = Vec3::UnitY();
        EndFrame hand;
        hand.joint = 1;
        hand.offset.position = Vec3(0.3, 0, 0);
        hand.points = {Vec3(0.05, 0, 0), Vec3(0, 0.05, 0), Vec3(0, 0, -0.05)};
        KinematicChain chain({j0, j1}, {hand}, {0, 1});

        for (int trial = 0; trial < 50; ++trial) {
            MotionClip clip;
            clip.fps = 50.0;
            for (int t = 0; t < 6; ++t) {
                ClipFrame f;
                f.root_pose = testutil::random_pose(rng, 0.5);
                f.joint_angles = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
                f.object_pose = testutil::random_pose(rng, 0.5);
                clip.frames.push_back(f);
            }
            for (bool clamp : {false, true}) {
                double got = penetration_loss(clip, chain, box, {1, 4}, clamp);
                double want = 0.0;
                for (std::size_t t = 1; t <= 4; ++t) {
                    Pose inv = clip.frames[t].object_pose.inverse();
                    for (const Vec3& p : chain.hand_points_world(
                             clip.frames[t].root_pose, clip.frames[t].joint_angles)) {
                        double d = box_sdf(Vec3(0.5, 0.5, 0.5), inv.apply(p));
                        want += clamp ? std::max(0.0, -d) : std::abs(d);
                    }
                }
                CHECK(got == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }

    SUBCASE("phase out of range") {
        KinematicChain chain = one_dof_chain(Vec3::Zero());
        MotionClip clip = moving_clip(3, 1, Vec3::Zero(), Vec3::Zero());
        CHECK_THROWS_AS(penetration_loss(clip, chain, box, {0, 5}, false), DomainError);
        CHECK_THROWS_AS(penetration_loss(clip, chain, box, {2, 1}, false), DomainError);
    }
}

TEST_CASE("finite-difference gradient matches the analytic box-SDF chain rule") {
    // 1-DoF chain rotating about z; analytic gradient via the active face normal
    Vec3 h(0.3, 0.25, 0.2);
    SdfField box = SdfField::analytic_box(h);
    KinematicChain chain = one_dof_chain(Vec3(1, 0, 0));
    Rng rng(72);
    int checked = 0;
    while (checked < 200) {
        double theta = rng.uniform(-0.6, 0.6);
        Vec3 obj_pos(rng.uniform(0.6, 1.1), rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.1));

        auto point_obj = [&](double a) {
            return (Vec3(std::cos(a), std::sin(a), 0.0) - obj_pos).eval();
        };
        Vec3 p = point_obj(theta);
        Vec3 q = p.cwiseAbs() - h;
        // skip degenerate configurations: near the surface, near an active-set
        // switch, or near a coordinate plane of the active axis
        double d = box_sdf(h, p);
        if (std::abs(d) < 1e-2) continue;
        Vec3 grad_sdf;
        if (d < 0.0) {
            int axis = 0;
            q.maxCoeff(&axis);
            std::array<double, 3> sorted{q.x(), q.y(), q.z()};
            std::sort(sorted.begin(), sorted.end());
            if (sorted[2] - sorted[1] < 1e-2) continue;  // ambiguous active face
            grad_sdf = Vec3::Zero();
            grad_sdf[axis] = p[axis] >= 0.0 ? 1.0 : -1.0;
        } else {
            Vec3 outside = q.cwiseMax(0.0);
            if (outside.norm() < 1e-2) continue;
            for (int i = 0; i < 3; ++i)
                grad_sdf[i] = (p[i] >= 0.0 ? outside[i] : -outside[i]) / outside.norm();
        }
        if (p.cwiseAbs().minCoeff() < 1e-2) continue;

        // d point / d theta (object frame shares world axes here)
        Vec3 dp_dtheta(-std::sin(theta), std::cos(theta), 0.0);
        double sign = d >= 0.0 ? 1.0 : -1.0;  // gradient of |sdf|
        double analytic = sign * grad_sdf.dot(dp_dtheta);

        MotionClip clip;
        clip.fps = 50.0;
        ClipFrame f;
        f.joint_angles = {theta};
        f.object_pose.position = obj_pos;
        clip.frames.push_back(f);

        const double step = 1e-6;
        ClipFrame fp = f, fm = f;
        fp.joint_angles[0] += step;
        fm.joint_angles[0] -= step;
        MotionClip cp = clip, cm = clip;
        cp.frames[0] = fp;
        cm.frames[0] = fm;
        double fd = (penetration_loss(cp, chain, box, {0, 0}, false) -
                     penetration_loss(cm, chain, box, {0, 0}, false)) /
                    (2.0 * step);
        if (std::abs(analytic) < 1e-6) continue;
        CHECK(std::abs(fd - analytic) / std::abs(analytic) < 1e-4);
        ++checked;
    }
}

TEST_CASE("optimize_contact") {
    SUBCASE("zero-loss clip is returned unchanged") {
        SdfField box = SdfField::analytic_box(Vec3(0.5, 0.5, 0.5));
        KinematicChain chain = one_dof_chain(Vec3(2.0, 0, 0));  // well outside
        MotionClip clip = moving_clip(6, 1, Vec3::Zero(), Vec3(0.01, 0, 0));
        ContactOptParams params;
        params.clamp_outside = true;
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        CHECK(res.initial_loss == doctest::Approx(0.0));
        CHECK(res.final_loss == doctest::Approx(0.0));
        CHECK(res.stalled);  // zero gradient never improves
        for (std::size_t t = 0; t < clip.frames.size(); ++t)
            CHECK(std::abs(res.clip.frames[t].joint_angles[0] -
                           clip.frames[t].joint_angles[0]) < 1e-12);
    }

    SUBCASE("1-DoF penetrating case converges below 1 mm") {
        // point at radius 1 penetrates 5 cm through the y face; rotating the
        // joint slides it out along the face normal
        Vec3 h(0.3, 0.25, 0.2);
        SdfField box = SdfField::analytic_box(h);
        KinematicChain chain = one_dof_chain(Vec3(1, 0, 0));
        MotionClip clip = moving_clip(6, 1, Vec3(0.95, 0.2, 0.0), Vec3(0, 0, 0.004));
        ContactOptParams params;
        params.adam.lr = 0.01;
        params.adam.iters = 500;
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        CHECK(res.initial_loss > 0.04 * 4);  // ~5 cm per phase frame
        CHECK(res.final_loss < 1e-3);
    }

    SUBCASE("4-DoF synthetic arm reaches below 10% of the initial loss") {
        Joint j0;
        j0.parent = -1;
        j0.axis = Vec3::UnitZ();
        Joint j1;
        j1.parent = 0;
        j1.offset.position = Vec3(0.3, 0, 0);
        j1.axis = Vec3::UnitY();
        Joint j2;
        j2.parent = 1;
        j2.offset.position = Vec3(0.3, 0, 0);
        j2.axis = Vec3::UnitZ();
        Joint j3;
        j3.parent = 2;
        j3.offset.position = Vec3(0.3, 0, 0);
        j3.axis = Vec3::UnitY();
        EndFrame hand;
        hand.joint = 3;
        hand.offset.position = Vec3(0.2, 0, 0);
        hand.points = {Vec3::Zero(), Vec3(0.04, 0, 0), Vec3(0, 0.04, 0)};
        KinematicChain chain({j0, j1, j2, j3}, {hand}, {0, 1, 2, 3});

        SdfField box = SdfField::analytic_box(Vec3(0.25, 0.25, 0.25));
        MotionClip clip;
        clip.fps = 50.0;
        for (int t = 0; t < 8; ++t) {
            ClipFrame f;
            // bent start: a straight arm sits at a kinematic singularity with
            // no radial gradient
            f.joint_angles = {0.3, -0.5, 0.4, 0.3};
            f.object_pose.position = Vec3(0.9, 0.004 * t, 0.0);
            clip.frames.push_back(f);
        }
        ContactOptParams params;  // default Adam: lr 1e-3, 500 iters
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        CHECK(res.initial_loss > 0.0);
        CHECK(res.final_loss < 0.1 * res.initial_loss);
    }

    SUBCASE("frames outside the phase and non-upper-body joints are bit-exact") {
        Vec3 h(0.3, 0.25, 0.2);
        SdfField box = SdfField::analytic_box(h);
        Joint j0;
        j0.parent = -1;
        j0.axis = Vec3::UnitZ();
        Joint j1;  // lower-body joint, excluded from optimization
        j1.parent = 0;
        j1.offset.position = Vec3(0.1, 0, 0);
        j1.axis = Vec3::UnitY();
        EndFrame hand;
        hand.joint = 0;
        hand.points = {Vec3(1, 0, 0)};
        KinematicChain chain({j0, j1}, {hand}, {0});  // only joint 0 is upper-body

        MotionClip clip = moving_clip(8, 2, Vec3(0.95, 0.2, 0.0), Vec3(0, 0, 0.004));
        for (auto& f : clip.frames) f.joint_angles = {0.0, 0.123456789};
        ContactOptParams params;
        params.adam.lr = 0.01;
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        ContactPhase phase = detect_contact_phase(clip, params.v_threshold);
        REQUIRE(res.clip.frames.size() == clip.frames.size());
        for (std::size_t t = 0; t < clip.frames.size(); ++t) {
            // lower-body joint untouched everywhere
            CHECK(res.clip.frames[t].joint_angles[1] == clip.frames[t].joint_angles[1]);
            if (t < phase.phi1 || t > phase.phi2) {
                CHECK(res.clip.frames[t].joint_angles[0] == clip.frames[t].joint_angles[0]);
            }
        }
        CHECK(res.final_loss <= res.initial_loss);
    }

    SUBCASE("joint limits are enforced by projection") {
        Vec3 h(0.3, 0.25, 0.2);
        SdfField box = SdfField::analytic_box(h);
        Joint j;
        j.parent = -1;
        j.axis = Vec3::UnitZ();
        j.lower = -0.02;  // optimum (~ -0.05 rad) lies outside the limits
        j.upper = 0.02;
        EndFrame hand;
        hand.joint = 0;
        hand.points = {Vec3(1, 0, 0)};
        KinematicChain chain({j}, {hand}, {0});
        MotionClip clip = moving_clip(6, 1, Vec3(0.95, 0.2, 0.0), Vec3(0, 0, 0.004));
        ContactOptParams params;
        params.adam.lr = 0.01;
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        for (const auto& f : res.clip.frames) {
            CHECK(f.joint_angles[0] >= j.lower - 1e-15);
            CHECK(f.joint_angles[0] <= j.upper + 1e-15);
        }
    }

    SUBCASE("loss curve is monotone nonincreasing (best-iterate record)") {
        Vec3 h(0.3, 0.25, 0.2);
        SdfField box = SdfField::analytic_box(h);
        KinematicChain chain = one_dof_chain(Vec3(1, 0, 0));
        MotionClip clip = moving_clip(6, 1, Vec3(0.95, 0.2, 0.0), Vec3(0, 0, 0.004));
        ContactOptParams params;
        params.adam.lr = 0.01;
        ContactOptResult res = optimize_contact(clip, chain, box, params);
        REQUIRE(!res.loss_curve.empty());
        for (std::size_t i = 1; i < res.loss_curve.size(); ++i)
            CHECK(res.loss_curve[i] <= res.loss_curve[i - 1] + 1e-15);
        CHECK(res.loss_curve.back() == doctest::Approx(res.final_loss));
    }

    SUBCASE("missing contact phase propagates") {
        SdfField box = SdfField::analytic_box(Vec3(0.5, 0.5, 0.5));
        KinematicChain chain = one_dof_chain(Vec3::Zero());
        MotionClip clip = moving_clip(10, 1, Vec3(1, 0, 0), Vec3::Zero());
        CHECK_THROWS_AS(optimize_contact(clip, chain, box, {}), NoContactPhaseError);
    }
}

TEST_CASE("kinematic chain forward pass and limits") {
    Joint j0;
    j0.parent = -1;
    j0.axis = Vec3::UnitZ();
    Joint j1;
    j1.parent = 0;
    j1.offset.position = Vec3(0.5, 0, 0);
    j1.axis = Vec3::UnitZ();
    j1.lower = -1.0;
    j1.upper = 1.0;
    EndFrame hand;
    hand.joint = 1;
    hand.offset.position = Vec3(0.5, 0, 0);
    hand.points = {Vec3::Zero()};
    KinematicChain chain({j0, j1}, {hand}, {0, 1});

    // planar 2-link arm: end point at standard trigonometric position
    std::vector<Vec3> pts = chain.hand_points_world(Pose::identity(), {M_PI / 2, -M_PI / 2});
    REQUIRE(pts.size() == 1);
    CHECK((pts[0] - Vec3(0.5, 0.5, 0)).norm() < 1e-12);

    std::vector<double> angles{0.5, 3.0};
    chain.clamp_to_limits(angles);
    CHECK(angles[0] == 0.5);
    CHECK(angles[1] == 1.0);
}
