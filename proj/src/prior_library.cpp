#include "prohoi/prior_library.hpp"

#include <cmath>

#include "prohoi/errors.hpp"

namespace prohoi {

std::size_t PriorLibrary::add(PriorEntry entry) {
    entries_.push_back(std::move(entry));
    return entries_.size() - 1;
}

const PriorEntry& PriorLibrary::entry(std::size_t index) const {
    if (index >= entries_.size()) throw DomainError("prior index out of range");
    return entries_[index];
}

double retrieval_score(const PriorEntry& entry, const Pose& current_object_pose,
                       const RetrievalWeights& weights) {
    double dp = (current_object_pose.position - entry.object_pose.position).norm();
    double dr;
    if (weights.yaw_only_rotation) {
        dr = std::abs(normalize_angle(yaw_of(current_object_pose.rotation) -
                                      yaw_of(entry.object_pose.rotation)));
    } else {
        dr = angular_distance(current_object_pose.rotation, entry.object_pose.rotation);
    }
    return weights.w_t * dp + weights.w_r * dr;
}

RetrievalResult PriorLibrary::retrieve(const Pose& current_object_pose,
                                       const RetrievalWeights& weights) const {
    if (entries_.empty()) throw NoPriorsError();
    if (weights.w_t < 0.0 || weights.w_r < 0.0 || (weights.w_t == 0.0 && weights.w_r == 0.0))
        throw ConfigError("retrieval weights must be nonnegative and not both zero");
    RetrievalResult best{0, retrieval_score(entries_[0], current_object_pose, weights)};
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        double s = retrieval_score(entries_[i], current_object_pose, weights);
        if (s < best.score) best = {i, s};
    }
    return best;
}

Pose PriorLibrary::target_pose(std::size_t k, const Pose& current_object_pose,
                               const Pose& root_pose) const {
    const PriorEntry& e = entry(k);
    Vec3 compensated = e.interaction_pose.position +
                       (current_object_pose.position - e.object_pose.position);
    Pose target;
    target.position = yaw_only(root_pose.rotation) * compensated + root_pose.position;
    target.rotation = root_pose.rotation * e.interaction_pose.rotation;
    return target;
}

}  // namespace prohoi
