#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace prohoi {

using Vec2 = Eigen::Vector2d;

// Planar occupancy grid. Cell (ix, iy) spans
// [origin + cell_size*(ix, iy), origin + cell_size*(ix+1, iy+1)).
class OccupancyMap {
public:
    OccupancyMap() = default;
    OccupancyMap(Vec2 origin, double cell_size, int width, int height, bool occupied = false);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    const Vec2& origin() const { return origin_; }

    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width_ && iy >= 0 && iy < height_;
    }
    bool occupied(int ix, int iy) const { return cells_[idx(ix, iy)]; }
    void set_occupied(int ix, int iy, bool value) { cells_[idx(ix, iy)] = value; }

    // Mark every cell whose center falls inside the axis-aligned box.
    void fill_box(const Vec2& lo, const Vec2& hi);

    Vec2 cell_center(int ix, int iy) const {
        return origin_ + cell_size_ * Vec2(ix + 0.5, iy + 0.5);
    }
    // Cell containing the point; may be out of bounds.
    std::pair<int, int> cell_of(const Vec2& p) const;

    // Occupancy dilated by a Euclidean disk of the given radius (meters).
    OccupancyMap inflated(double radius) const;

    // All cells on the segment free and in bounds (supercover traversal).
    bool line_of_sight(int ax, int ay, int bx, int by) const;

    // P5 PGM, threshold >= 128 free; sidecar JSON {origin, cell_size}.
    static OccupancyMap load_pgm(const std::string& pgm_path, const std::string& sidecar_path);
    void save_pgm(const std::string& pgm_path, const std::string& sidecar_path) const;

private:
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * width_ + ix; }

    Vec2 origin_ = Vec2::Zero();
    double cell_size_ = 0.05;
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> cells_;
};

}  // namespace prohoi
