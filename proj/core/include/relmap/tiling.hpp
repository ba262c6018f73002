#pragma once

#include <vector>

namespace relmap {

/// Square tile addressed by (origin, side) in parent pixel coordinates.
struct Tile {
    int x = 0;
    int y = 0;
    int side = 0;

    bool operator==(const Tile&) const = default;
    bool contains(int px, int py) const {
        return px >= x && px < x + side && py >= y && py < y + side;
    }
};

/// Regular tiling grid with origins at multiples of `stride`. When the last
/// grid tile on an axis does not reach the image border, one extra tile
/// clamped to the border is appended so every pixel is covered.
std::vector<Tile> tile_grid(int width, int height, int side, int stride);

} // namespace relmap
