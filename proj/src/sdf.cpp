#include "prohoi/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "prohoi/errors.hpp"

namespace prohoi {

double box_sdf(const Vec3& half_extents, const Vec3& p) {
    Vec3 q = p.cwiseAbs() - half_extents;
    Vec3 outside = q.cwiseMax(0.0);
    double inside = std::min(q.maxCoeff(), 0.0);
    return outside.norm() + inside;
}

SdfField SdfField::analytic_box(const Vec3& half_extents) {
    if ((half_extents.array() <= 0.0).any()) throw ConfigError("box half extents must be positive");
    SdfField f;
    f.half_extents_ = half_extents;
    return f;
}

SdfField SdfField::sampled_grid(const Vec3& origin, double cell_size, int nx, int ny, int nz,
                                std::vector<double> values) {
    if (cell_size <= 0.0) throw ConfigError("grid cell size must be positive");
    if (nx < 2 || ny < 2 || nz < 2) throw ConfigError("grid needs at least 2 nodes per axis");
    if (values.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw ConfigError("grid value count does not match dimensions");
    SdfField f;
    f.origin_ = origin;
    f.cell_ = cell_size;
    f.nx_ = nx;
    f.ny_ = ny;
    f.nz_ = nz;
    f.grid_values_ = std::move(values);
    return f;
}

SdfField SdfField::sample(const Vec3& origin, double cell_size, int nx, int ny, int nz,
                          const std::function<double(const Vec3&)>& fn) {
    std::vector<double> values(static_cast<std::size_t>(nx) * ny * nz);
    std::size_t i = 0;
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                values[i++] = fn(origin + cell_size * Vec3(ix, iy, iz));
    return sampled_grid(origin, cell_size, nx, ny, nz, std::move(values));
}

double SdfField::query(const Vec3& p) const {
    if (is_analytic()) return box_sdf(half_extents_, p);
    return query_grid(p);
}

double SdfField::query_grid(const Vec3& p) const {
    Vec3 hi = origin_ + cell_ * Vec3(nx_ - 1, ny_ - 1, nz_ - 1);
    Vec3 clamped = p.cwiseMax(origin_).cwiseMin(hi);
    double outside = (p - clamped).norm();

    Vec3 local = (clamped - origin_) / cell_;
    int ix = std::min(static_cast<int>(local.x()), nx_ - 2);
    int iy = std::min(static_cast<int>(local.y()), ny_ - 2);
    int iz = std::min(static_cast<int>(local.z()), nz_ - 2);
    double fx = local.x() - ix, fy = local.y() - iy, fz = local.z() - iz;

    auto at = [&](int x, int y, int z) {
        return grid_values_[(static_cast<std::size_t>(z) * ny_ + y) * nx_ + x];
    };
    double c00 = at(ix, iy, iz) * (1 - fx) + at(ix + 1, iy, iz) * fx;
    double c10 = at(ix, iy + 1, iz) * (1 - fx) + at(ix + 1, iy + 1, iz) * fx;
    double c01 = at(ix, iy, iz + 1) * (1 - fx) + at(ix + 1, iy, iz + 1) * fx;
    double c11 = at(ix, iy + 1, iz + 1) * (1 - fx) + at(ix + 1, iy + 1, iz + 1) * fx;
    double value = (c00 * (1 - fy) + c10 * fy) * (1 - fz) + (c01 * (1 - fy) + c11 * fy) * fz;
    return value + outside;
}

std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points, double cell) {
    if (cell <= 0.0) throw ConfigError("voxel cell size must be positive");
    std::map<std::tuple<long, long, long>, std::pair<Vec3, int>> voxels;
    for (const Vec3& p : points) {
        auto key = std::make_tuple(static_cast<long>(std::floor(p.x() / cell)),
                                   static_cast<long>(std::floor(p.y() / cell)),
                                   static_cast<long>(std::floor(p.z() / cell)));
        auto& [sum, count] = voxels.try_emplace(key, std::make_pair(Vec3::Zero().eval(), 0)).first->second;
        sum += p;
        ++count;
    }
    std::vector<Vec3> out;
    out.reserve(voxels.size());
    for (const auto& [key, acc] : voxels) out.push_back(acc.first / acc.second);
    return out;
}

}  // namespace prohoi
