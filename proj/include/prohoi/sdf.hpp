#pragma once

#include <functional>
#include <vector>

#include "prohoi/se3.hpp"

namespace prohoi {

// Signed distance to object geometry, negative inside. Either an exact
// axis-aligned box centered at the origin or a trilinearly interpolated
// sampled grid.
class SdfField {
public:
    static SdfField analytic_box(const Vec3& half_extents);
    static SdfField sampled_grid(const Vec3& origin, double cell_size, int nx, int ny, int nz,
                                 std::vector<double> values);
    // Sample an arbitrary signed-distance function onto a grid.
    static SdfField sample(const Vec3& origin, double cell_size, int nx, int ny, int nz,
                           const std::function<double(const Vec3&)>& fn);

    double query(const Vec3& p) const;

    bool is_analytic() const { return grid_values_.empty(); }
    const Vec3& box_half_extents() const { return half_extents_; }

private:
    SdfField() = default;

    double query_grid(const Vec3& p) const;

    // analytic box
    Vec3 half_extents_ = Vec3::Zero();
    // sampled grid
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 0.0;
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<double> grid_values_;
};

// Exact SDF of an origin-centered axis-aligned box.
double box_sdf(const Vec3& half_extents, const Vec3& p);

// Voxel-grid downsampling: one centroid per occupied voxel of the given cell
// size, ordered by voxel index (x fastest).
std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points, double cell);

}  // namespace prohoi
