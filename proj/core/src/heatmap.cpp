#include "relmap/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relmap {

std::vector<double> tile_pixel_relevance(const TileRelevance& tile) {
    if (tile.keypoints.size() != tile.relevance.size()) {
        throw std::invalid_argument("tile_pixel_relevance: keypoint/relevance size mismatch");
    }
    const int side = tile.tile.side;
    std::vector<double> rel(static_cast<std::size_t>(side) * side, 0.0);
    for (std::size_t l = 0; l < tile.keypoints.size(); ++l) {
        const Keypoint& kp = tile.keypoints[l];
        const double score = tile.relevance[l];
        if (score == 0.0) continue;
        const int r = static_cast<int>(std::floor(kp.radius));
        const double r2 = kp.radius * kp.radius;
        const int cx = static_cast<int>(std::lround(kp.x));
        const int cy = static_cast<int>(std::lround(kp.y));
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                int lx = cx + dx - tile.tile.x;
                int ly = cy + dy - tile.tile.y;
                if (lx < 0 || lx >= side || ly < 0 || ly >= side) continue;
                rel[static_cast<std::size_t>(ly) * side + lx] += score;
            }
        }
    }
    return rel;
}

Plane pixel_heatmap(int width, int height, const std::vector<TileRelevance>& tiles,
                    TileNormalization mode) {
    Plane sum(width, height, 0.0f);
    std::vector<double> acc(static_cast<std::size_t>(width) * height, 0.0);
    std::vector<std::uint32_t> cover(acc.size(), 0);

    for (const TileRelevance& tr : tiles) {
        std::vector<double> rel = tile_pixel_relevance(tr);
        if (mode == TileNormalization::PerTileThenGlobal) {
            double peak = 0.0;
            for (double v : rel) peak = std::max(peak, std::abs(v));
            if (peak > 0.0) {
                for (double& v : rel) v /= peak;
            }
        }
        const int side = tr.tile.side;
        for (int ly = 0; ly < side; ++ly) {
            int y = tr.tile.y + ly;
            if (y < 0 || y >= height) continue;
            for (int lx = 0; lx < side; ++lx) {
                int x = tr.tile.x + lx;
                if (x < 0 || x >= width) continue;
                std::size_t i = static_cast<std::size_t>(y) * width + x;
                acc[i] += rel[static_cast<std::size_t>(ly) * side + lx];
                ++cover[i];
            }
        }
    }

    double peak = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (cover[i] > 0) acc[i] /= static_cast<double>(cover[i]);
        peak = std::max(peak, std::abs(acc[i]));
    }
    if (peak > 0.0) {
        for (std::size_t i = 0; i < acc.size(); ++i) {
            sum.values[i] = static_cast<float>(acc[i] / peak);
        }
    }
    return sum;
}

void heatmap_color(float value, float& r, float& g, float& b) {
    float v = std::clamp(value, -1.0f, 1.0f);
    if (v < 0.0f) {
        // green -> blue
        r = 0.0f;
        g = 1.0f + v;
        b = -v;
    } else if (v <= 0.5f) {
        // green -> yellow
        r = 2.0f * v;
        g = 1.0f;
        b = 0.0f;
    } else {
        // yellow -> red
        r = 1.0f;
        g = 2.0f * (1.0f - v);
        b = 0.0f;
    }
}

RasterImage render_heatmap(const Plane& heatmap, const RasterImage* base, float overlay_alpha) {
    for (float v : heatmap.values) {
        if (v < -1.0f - 1e-6f || v > 1.0f + 1e-6f) {
            throw std::invalid_argument("render_heatmap: values must lie in [-1, 1]");
        }
    }
    if (base && (base->width() != heatmap.width || base->height() != heatmap.height)) {
        throw std::invalid_argument("render_heatmap: base image size mismatch");
    }

    RasterImage out(heatmap.width, heatmap.height);
    for (int y = 0; y < heatmap.height; ++y) {
        for (int x = 0; x < heatmap.width; ++x) {
            float r, g, b;
            heatmap_color(heatmap.at(x, y), r, g, b);
            if (base) {
                float grey = (base->red().at(x, y) + base->green().at(x, y) +
                              base->blue().at(x, y)) / 3.0f;
                r = (1.0f - overlay_alpha) * grey + overlay_alpha * r;
                g = (1.0f - overlay_alpha) * grey + overlay_alpha * g;
                b = (1.0f - overlay_alpha) * grey + overlay_alpha * b;
            }
            out.set_pixel(x, y, r, g, b);
        }
    }
    return out;
}

} // namespace relmap
