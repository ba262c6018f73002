#include "relmap/tiling.hpp"

#include <stdexcept>

namespace relmap {

namespace {

std::vector<int> axis_origins(int extent, int side, int stride) {
    std::vector<int> origins;
    for (int o = 0; o + side <= extent; o += stride) origins.push_back(o);
    if (origins.empty() || origins.back() + side < extent) {
        origins.push_back(extent - side);
    }
    return origins;
}

} // namespace

std::vector<Tile> tile_grid(int width, int height, int side, int stride) {
    if (side < 1) throw std::invalid_argument("tile_grid: side must be >= 1");
    if (stride < 1) throw std::invalid_argument("tile_grid: stride must be >= 1");
    if (side > width || side > height) {
        throw std::invalid_argument("tile_grid: tile side exceeds image extent");
    }
    std::vector<int> xs = axis_origins(width, side, stride);
    std::vector<int> ys = axis_origins(height, side, stride);
    std::vector<Tile> tiles;
    tiles.reserve(xs.size() * ys.size());
    for (int y : ys) {
        for (int x : xs) tiles.push_back(Tile{x, y, side});
    }
    return tiles;
}

} // namespace relmap
