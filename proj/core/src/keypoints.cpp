#include "relmap/keypoints.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relmap {

std::vector<Keypoint> dense_keypoints(const Tile& tile, int stride,
                                      const std::vector<double>& scales) {
    if (stride < 1) throw std::invalid_argument("dense_keypoints: stride must be >= 1");
    if (scales.empty()) throw std::invalid_argument("dense_keypoints: scales must be nonempty");

    std::vector<Keypoint> kps;
    for (double scale : scales) {
        const double radius = 6.0 * scale;
        const int margin = static_cast<int>(std::ceil(radius));
        const int lo_x = tile.x + margin;
        const int hi_x = tile.x + tile.side - 1 - margin;
        const int lo_y = tile.y + margin;
        const int hi_y = tile.y + tile.side - 1 - margin;
        for (int y = lo_y; y <= hi_y; y += stride) {
            for (int x = lo_x; x <= hi_x; x += stride) {
                kps.push_back(Keypoint::at(x, y, scale));
            }
        }
    }
    return kps;
}

DominantOrientation dominant_orientation(const GradientField& field, const Keypoint& kp) {
    constexpr int kBins = 36;
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double bin_width = kTwoPi / kBins;

    std::array<double, kBins> hist{};
    const int r = static_cast<int>(std::floor(kp.radius));
    const double r2 = kp.radius * kp.radius;
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));

    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r2) continue;
            int px = cx + dx;
            int py = cy + dy;
            if (px < 0 || px >= field.width || py < 0 || py >= field.height) {
                throw std::invalid_argument("dominant_orientation: disc leaves the field");
            }
            double w = field.norm_at(px, py);
            if (w <= 0.0) continue;
            double angle = std::atan2(field.gy_at(px, py), field.gx_at(px, py));
            // Bins centered on multiples of bin_width.
            double pos = (angle + std::numbers::pi) / bin_width + 0.5;
            int bin = static_cast<int>(std::floor(pos)) % kBins;
            hist[bin] += w;
            total += w;
        }
    }

    if (total <= 0.0) return DominantOrientation{0.0, true};

    int peak = 0;
    for (int b = 1; b < kBins; ++b) {
        if (hist[b] > hist[peak]) peak = b;
    }
    double hl = hist[(peak + kBins - 1) % kBins];
    double hp = hist[peak];
    double hr = hist[(peak + 1) % kBins];
    double denom = hl - 2.0 * hp + hr;
    double offset = denom == 0.0 ? 0.0 : 0.5 * (hl - hr) / denom;

    double angle = (peak + offset) * bin_width - std::numbers::pi;
    angle = std::fmod(angle + kTwoPi, kTwoPi);
    return DominantOrientation{angle, false};
}

} // namespace relmap
