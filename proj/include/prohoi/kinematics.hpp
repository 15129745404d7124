#pragma once

#include <string>
#include <vector>

#include "prohoi/se3.hpp"

namespace prohoi {

// Single revolute joint: frame = parent_frame * offset * Rot(axis, angle).
struct Joint {
    std::string name;
    int parent = -1;  // -1 attaches to the root
    Pose offset;
    Vec3 axis = Vec3::UnitZ();
    double lower = -3.14;
    double upper = 3.14;
};

// Named frame rigidly attached to a joint, carrying the hand sample points
// (object-independent, expressed in the end frame).
struct EndFrame {
    std::string name;
    int joint = 0;
    Pose offset;
    std::vector<Vec3> points;
};

class KinematicChain {
public:
    KinematicChain() = default;
    KinematicChain(std::vector<Joint> joints, std::vector<EndFrame> end_frames,
                   std::vector<int> upper_body_indices);

    std::size_t dof() const { return joints_.size(); }
    const std::vector<Joint>& joints() const { return joints_; }
    const std::vector<EndFrame>& end_frames() const { return end_frames_; }
    const std::vector<int>& upper_body_indices() const { return upper_body_; }

    // Pose of every joint frame relative to the root.
    std::vector<Pose> forward(const std::vector<double>& angles) const;

    // All end-frame sample points in world coordinates.
    std::vector<Vec3> hand_points_world(const Pose& root, const std::vector<double>& angles) const;

    void clamp_to_limits(std::vector<double>& angles) const;

private:
    std::vector<Joint> joints_;
    std::vector<EndFrame> end_frames_;
    std::vector<int> upper_body_;
};

}  // namespace prohoi
