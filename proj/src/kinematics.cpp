#include "prohoi/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

KinematicChain::KinematicChain(std::vector<Joint> joints, std::vector<EndFrame> end_frames,
                               std::vector<int> upper_body_indices)
    : joints_(std::move(joints)), end_frames_(std::move(end_frames)),
      upper_body_(std::move(upper_body_indices)) {
    for (std::size_t i = 0; i < joints_.size(); ++i) {
        const Joint& j = joints_[i];
        if (j.parent >= static_cast<int>(i))
            throw ConfigError("joint '" + j.name + "' must come after its parent");
        if (j.parent < -1) throw ConfigError("invalid parent index for joint '" + j.name + "'");
        if (std::abs(j.axis.norm() - 1.0) > 1e-9)
            throw ConfigError("joint '" + j.name + "' axis must be unit length");
        if (j.lower >= j.upper)
            throw ConfigError("joint '" + j.name + "' limits must satisfy lower < upper");
    }
    for (const EndFrame& e : end_frames_) {
        if (e.joint < 0 || e.joint >= static_cast<int>(joints_.size()))
            throw ConfigError("end frame '" + e.name + "' references an unknown joint");
    }
    for (int idx : upper_body_) {
        if (idx < 0 || idx >= static_cast<int>(joints_.size()))
            throw ConfigError("upper-body index out of range");
    }
}

std::vector<Pose> KinematicChain::forward(const std::vector<double>& angles) const {
    if (angles.size() != joints_.size())
        throw DomainError("joint angle vector does not match chain dof");
    std::vector<Pose> frames(joints_.size());
    for (std::size_t i = 0; i < joints_.size(); ++i) {
        const Joint& j = joints_[i];
        Pose local = j.offset * Pose{Vec3::Zero(), Rotation::from_axis_angle(j.axis, angles[i])};
        frames[i] = (j.parent < 0) ? local : frames[j.parent] * local;
    }
    return frames;
}

std::vector<Vec3> KinematicChain::hand_points_world(const Pose& root,
                                                    const std::vector<double>& angles) const {
    std::vector<Pose> frames = forward(angles);
    std::vector<Vec3> out;
    for (const EndFrame& e : end_frames_) {
        Pose frame = root * frames[e.joint] * e.offset;
        for (const Vec3& p : e.points) out.push_back(frame.apply(p));
    }
    return out;
}

void KinematicChain::clamp_to_limits(std::vector<double>& angles) const {
    if (angles.size() != joints_.size())
        throw DomainError("joint angle vector does not match chain dof");
    for (std::size_t i = 0; i < joints_.size(); ++i)
        angles[i] = std::clamp(angles[i], joints_[i].lower, joints_[i].upper);
}

}  // namespace prohoi
