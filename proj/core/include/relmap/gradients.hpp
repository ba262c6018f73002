#pragma once

#include "relmap/image.hpp"

namespace relmap {

/// Per-pixel gradient vectors and their l2 norms for one channel plane.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<float> gx;
    std::vector<float> gy;
    std::vector<float> norm;

    float gx_at(int x, int y) const { return gx[static_cast<std::size_t>(y) * width + x]; }
    float gy_at(int x, int y) const { return gy[static_cast<std::size_t>(y) * width + x]; }
    float norm_at(int x, int y) const { return norm[static_cast<std::size_t>(y) * width + x]; }
};

/// Unnormalized 3x3 Sobel filter, no pre-blur. Border pixels use replicate
/// padding. Requires a plane of at least 3x3.
GradientField sobel_gradients(const Plane& plane);

} // namespace relmap
