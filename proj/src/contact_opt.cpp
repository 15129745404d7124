#include "prohoi/contact_opt.hpp"

#include <algorithm>
#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

ContactPhase detect_contact_phase(const MotionClip& clip, double v_threshold) {
    if (clip.frames.size() < 2) throw DomainError("clip needs at least 2 frames");
    if (clip.fps <= 0.0) throw ConfigError("clip fps must be positive");
    std::size_t first = clip.frames.size();
    std::size_t last = 0;
    for (std::size_t t = 1; t + 1 < clip.frames.size(); ++t) {
        double speed = (clip.frames[t + 1].object_pose.position -
                        clip.frames[t - 1].object_pose.position)
                           .norm() *
                       clip.fps / 2.0;
        if (speed > v_threshold) {
            first = std::min(first, t);
            last = std::max(last, t);
        }
    }
    if (first == clip.frames.size()) throw NoContactPhaseError();
    return {first, last};
}

namespace {

double frame_loss(const ClipFrame& frame, const KinematicChain& chain, const SdfField& field,
                  bool clamp_outside) {
    Pose world_to_object = frame.object_pose.inverse();
    double loss = 0.0;
    for (const Vec3& p : chain.hand_points_world(frame.root_pose, frame.joint_angles)) {
        double d = field.query(world_to_object.apply(p));
        loss += clamp_outside ? std::max(0.0, -d) : std::abs(d);
    }
    return loss;
}

}  // namespace

double penetration_loss(const MotionClip& clip, const KinematicChain& chain, const SdfField& field,
                        const ContactPhase& phase, bool clamp_outside) {
    if (phase.phi1 > phase.phi2 || phase.phi2 >= clip.frames.size())
        throw DomainError("contact phase out of clip range");
    double loss = 0.0;
    for (std::size_t t = phase.phi1; t <= phase.phi2; ++t)
        loss += frame_loss(clip.frames[t], chain, field, clamp_outside);
    return loss;
}

ContactOptResult optimize_contact(const MotionClip& clip, const KinematicChain& chain,
                                  const SdfField& field, const ContactOptParams& params) {
    ContactPhase phase = detect_contact_phase(clip, params.v_threshold);
    const auto& upper = chain.upper_body_indices();
    const std::size_t n_frames = phase.phi2 - phase.phi1 + 1;
    const std::size_t n_params = n_frames * upper.size();

    ContactOptResult result;
    result.clip = clip;
    MotionClip work = clip;

    auto loss_of_frame = [&](std::size_t t) {
        return frame_loss(work.frames[t], chain, field, params.clamp_outside);
    };
    std::vector<double> frame_losses(n_frames);
    auto total = [&] {
        double s = 0.0;
        for (std::size_t f = 0; f < n_frames; ++f) {
            frame_losses[f] = loss_of_frame(phase.phi1 + f);
            s += frame_losses[f];
        }
        return s;
    };

    double best_loss = total();
    result.initial_loss = best_loss;
    MotionClip best = work;

    std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params, 0.0);
    int since_improvement = 0;
    for (int iter = 1; iter <= params.adam.iters; ++iter) {
        // Central differences; each parameter only affects its own frame.
        for (std::size_t f = 0; f < n_frames; ++f) {
            std::size_t t = phase.phi1 + f;
            for (std::size_t j = 0; j < upper.size(); ++j) {
                double& angle = work.frames[t].joint_angles[upper[j]];
                double saved = angle;
                angle = saved + params.fd_step;
                double plus = loss_of_frame(t);
                angle = saved - params.fd_step;
                double minus = loss_of_frame(t);
                angle = saved;
                grad[f * upper.size() + j] = (plus - minus) / (2.0 * params.fd_step);
            }
        }

        double bc1 = 1.0 - std::pow(params.adam.beta1, iter);
        double bc2 = 1.0 - std::pow(params.adam.beta2, iter);
        for (std::size_t f = 0; f < n_frames; ++f) {
            std::size_t t = phase.phi1 + f;
            for (std::size_t j = 0; j < upper.size(); ++j) {
                std::size_t k = f * upper.size() + j;
                m[k] = params.adam.beta1 * m[k] + (1.0 - params.adam.beta1) * grad[k];
                v[k] = params.adam.beta2 * v[k] + (1.0 - params.adam.beta2) * grad[k] * grad[k];
                double step = params.adam.lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + params.adam.eps);
                double& angle = work.frames[t].joint_angles[upper[j]];
                angle = std::clamp(angle - step, chain.joints()[upper[j]].lower,
                                   chain.joints()[upper[j]].upper);
            }
        }

        double loss = total();
        if (loss < best_loss) {
            best_loss = loss;
            best = work;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        result.loss_curve.push_back(best_loss);
        if (since_improvement >= params.stall_iters) {
            result.stalled = true;
            break;
        }
    }

    result.clip = std::move(best);
    result.final_loss = best_loss;
    return result;
}

}  // namespace prohoi
