#include "relmap/gradients.hpp"

#include <cmath>
#include <stdexcept>

namespace relmap {

GradientField sobel_gradients(const Plane& plane) {
    if (plane.width < 3 || plane.height < 3) {
        throw std::invalid_argument("sobel_gradients: plane must be at least 3x3");
    }
    const int w = plane.width;
    const int h = plane.height;
    GradientField field;
    field.width = w;
    field.height = h;
    field.gx.resize(plane.size());
    field.gy.resize(plane.size());
    field.norm.resize(plane.size());

    auto clamped = [&](int x, int y) {
        x = x < 0 ? 0 : (x >= w ? w - 1 : x);
        y = y < 0 ? 0 : (y >= h ? h - 1 : y);
        return plane.at(x, y);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float p00 = clamped(x - 1, y - 1), p10 = clamped(x, y - 1), p20 = clamped(x + 1, y - 1);
            float p01 = clamped(x - 1, y),                               p21 = clamped(x + 1, y);
            float p02 = clamped(x - 1, y + 1), p12 = clamped(x, y + 1), p22 = clamped(x + 1, y + 1);
            float gx = (p20 + 2.0f * p21 + p22) - (p00 + 2.0f * p01 + p02);
            float gy = (p02 + 2.0f * p12 + p22) - (p00 + 2.0f * p10 + p20);
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            field.gx[i] = gx;
            field.gy[i] = gy;
            field.norm[i] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return field;
}

} // namespace relmap
