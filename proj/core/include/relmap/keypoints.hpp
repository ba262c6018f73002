#pragma once

#include "relmap/gradients.hpp"
#include "relmap/tiling.hpp"

#include <vector>

namespace relmap {

/// Dense-grid keypoint. The descriptor support is the disc of radius
/// 6 * scale around the center; a pixel (px,py) belongs to the support when
/// (px-x)^2 + (py-y)^2 <= radius^2.
struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double scale = 0.0;
    double radius = 0.0;

    static Keypoint at(double x, double y, double scale) {
        return Keypoint{x, y, scale, 6.0 * scale};
    }
};

/// Grid keypoints inside a tile, one set per scale. The grid is anchored at
/// the first center whose disc fits (margin = ceil(radius)) and keypoints
/// whose disc would leave the tile are dropped.
std::vector<Keypoint> dense_keypoints(const Tile& tile, int stride,
                                      const std::vector<double>& scales);

struct DominantOrientation {
    double angle = 0.0;   // radians in [0, 2*pi)
    bool degenerate = false; // all-zero gradients in the disc
};

/// Peak of a 36-bin gradient-orientation histogram over the keypoint disc,
/// weighted by gradient norm, with parabolic peak interpolation. Bins are
/// centered on multiples of 10 degrees so axis-aligned gradients map exactly.
DominantOrientation dominant_orientation(const GradientField& field, const Keypoint& kp);

} // namespace relmap
