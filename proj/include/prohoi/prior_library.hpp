#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "prohoi/se3.hpp"

namespace prohoi {

// Object pose / robot interaction pose pair recorded at contact onset,
// both expressed in the initial-frame robot coordinate system.
struct PriorEntry {
    Pose object_pose;
    Pose interaction_pose;
    std::string source_clip_id;
};

struct RetrievalWeights {
    double w_t = 1.0;  // per meter
    double w_r = 0.3;  // per radian
    bool yaw_only_rotation = false;  // compare yaw difference instead of full geodesic
};

struct RetrievalResult {
    std::size_t index = 0;
    double score = 0.0;
};

class PriorLibrary {
public:
    std::size_t add(PriorEntry entry);

    const PriorEntry& entry(std::size_t index) const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<PriorEntry>& entries() const { return entries_; }

    // Weighted nearest neighbor over the library:
    //   S_i = w_t * |p_cur - p_i| + w_r * dist(R_cur, R_i)
    // Ties break toward the lowest insertion index.
    RetrievalResult retrieve(const Pose& current_object_pose, const RetrievalWeights& weights) const;

    // Global interaction target for prior k, compensated for the deviation
    // between the current and stored object locations:
    //   p_target = yaw_only(R_root) * (p_int + (p_obj_cur - p_obj_k)) + p_root
    //   R_target = R_root * R_int
    Pose target_pose(std::size_t k, const Pose& current_object_pose, const Pose& root_pose) const;

private:
    std::vector<PriorEntry> entries_;
};

double retrieval_score(const PriorEntry& entry, const Pose& current_object_pose,
                       const RetrievalWeights& weights);

}  // namespace prohoi
