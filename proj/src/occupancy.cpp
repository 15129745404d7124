#include "prohoi/occupancy.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "prohoi/errors.hpp"

namespace prohoi {

OccupancyMap::OccupancyMap(Vec2 origin, double cell_size, int width, int height, bool occupied)
    : origin_(std::move(origin)), cell_size_(cell_size), width_(width), height_(height),
      cells_(static_cast<std::size_t>(width) * height, occupied ? 1 : 0) {
    if (cell_size <= 0.0) throw ConfigError("cell_size must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("grid dimensions must be positive");
}

void OccupancyMap::fill_box(const Vec2& lo, const Vec2& hi) {
    for (int iy = 0; iy < height_; ++iy) {
        for (int ix = 0; ix < width_; ++ix) {
            Vec2 c = cell_center(ix, iy);
            if (c.x() >= lo.x() && c.x() <= hi.x() && c.y() >= lo.y() && c.y() <= hi.y())
                set_occupied(ix, iy, true);
        }
    }
}

std::pair<int, int> OccupancyMap::cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x() - origin_.x()) / cell_size_)),
            static_cast<int>(std::floor((p.y() - origin_.y()) / cell_size_))};
}

OccupancyMap OccupancyMap::inflated(double radius) const {
    OccupancyMap out = *this;
    if (radius <= 0.0) return out;
    int r = static_cast<int>(std::ceil(radius / cell_size_));
    for (int iy = 0; iy < height_; ++iy) {
        for (int ix = 0; ix < width_; ++ix) {
            if (!occupied(ix, iy)) continue;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (cell_size_ * std::hypot(dx, dy) > radius + 1e-12) continue;
                    if (out.in_bounds(ix + dx, iy + dy)) out.set_occupied(ix + dx, iy + dy, true);
                }
            }
        }
    }
    return out;
}

bool OccupancyMap::line_of_sight(int ax, int ay, int bx, int by) const {
    // Supercover: visit every cell the segment between centers touches.
    if (!in_bounds(ax, ay) || !in_bounds(bx, by)) return false;
    int dx = std::abs(bx - ax), dy = std::abs(by - ay);
    int x = ax, y = ay;
    int sx = bx > ax ? 1 : -1;
    int sy = by > ay ? 1 : -1;
    if (occupied(x, y)) return false;
    int ix = 0, iy = 0;
    while (ix < dx || iy < dy) {
        long long decide = (1 + 2 * (long long)ix) * dy - (1 + 2 * (long long)iy) * dx;
        if (decide == 0) {
            // corner crossing: both diagonal neighbors must be free
            if (!in_bounds(x + sx, y) || !in_bounds(x, y + sy)) return false;
            if (occupied(x + sx, y) && occupied(x, y + sy)) return false;
            x += sx;
            y += sy;
            ++ix;
            ++iy;
        } else if (decide < 0) {
            x += sx;
            ++ix;
        } else {
            y += sy;
            ++iy;
        }
        if (!in_bounds(x, y) || occupied(x, y)) return false;
    }
    return true;
}

OccupancyMap OccupancyMap::load_pgm(const std::string& pgm_path, const std::string& sidecar_path) {
    std::ifstream f(pgm_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open map file: " + pgm_path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw ConfigError("map must be a binary (P5) PGM: " + pgm_path);
    auto next_token = [&f, &pgm_path]() {
        std::string tok;
        while (f >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(f, rest);
                continue;
            }
            return tok;
        }
        throw ConfigError("truncated PGM header: " + pgm_path);
    };
    int w = std::stoi(next_token());
    int h = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (maxval <= 0 || maxval > 255) throw ConfigError("unsupported PGM maxval");
    f.get();  // single whitespace after header
    std::vector<char> data(static_cast<std::size_t>(w) * h);
    f.read(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw ConfigError("truncated PGM payload: " + pgm_path);

    std::ifstream sf(sidecar_path);
    if (!sf) throw ConfigError("cannot open map sidecar: " + sidecar_path);
    nlohmann::json side = nlohmann::json::parse(sf);
    Vec2 origin(side.at("origin").at(0).get<double>(), side.at("origin").at(1).get<double>());
    double cell = side.at("cell_size").get<double>();

    OccupancyMap map(origin, cell, w, h);
    // PGM rows run top-down; row 0 of the file is the highest-y row.
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            auto v = static_cast<std::uint8_t>(data[static_cast<std::size_t>(h - 1 - iy) * w + ix]);
            map.set_occupied(ix, iy, v < 128);
        }
    }
    return map;
}

void OccupancyMap::save_pgm(const std::string& pgm_path, const std::string& sidecar_path) const {
    std::ofstream f(pgm_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write map file: " + pgm_path);
    f << "P5\n" << width_ << " " << height_ << "\n255\n";
    for (int iy = height_ - 1; iy >= 0; --iy)
        for (int ix = 0; ix < width_; ++ix)
            f.put(occupied(ix, iy) ? '\0' : static_cast<char>(255));

    nlohmann::json side;
    side["origin"] = {origin_.x(), origin_.y()};
    side["cell_size"] = cell_size_;
    std::ofstream sf(sidecar_path);
    sf << side.dump(2) << "\n";
}

}  // namespace prohoi
