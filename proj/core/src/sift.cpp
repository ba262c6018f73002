#include "relmap/descriptors.hpp"

#include <cmath>
#include <numbers>

namespace relmap {

namespace {

constexpr int kSpatialBins = 4;
constexpr int kOriBins = 8;
constexpr int kSiftDim = kSpatialBins * kSpatialBins * kOriBins;
constexpr float kClamp = 0.2f;

} // namespace

std::vector<float> sift_descriptor(const GradientField& field, const Keypoint& kp,
                                   double orientation) {
    std::vector<float> desc(kSiftDim, 0.0f);

    const int r = static_cast<int>(std::floor(kp.radius));
    const double r2 = kp.radius * kp.radius;
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    const double cell = kp.radius / 2.0; // 4 cells across the diameter
    const double sigma = kp.radius / 2.0;
    const double gauss_denom = 2.0 * sigma * sigma;
    const double cos_t = std::cos(orientation);
    const double sin_t = std::sin(orientation);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double d2 = dx * dx + dy * dy;
            if (d2 > r2) continue;
            const int px = cx + dx;
            const int py = cy + dy;
            const double mag = field.norm_at(px, py);
            if (mag <= 0.0) continue;

            // Offset in the rotated keypoint frame, in cell units, shifted so
            // the 4x4 grid spans [-0.5, 3.5].
            const double u = (cos_t * dx + sin_t * dy) / cell + 1.5;
            const double v = (-sin_t * dx + cos_t * dy) / cell + 1.5;

            double theta = std::atan2(field.gy_at(px, py), field.gx_at(px, py)) - orientation;
            theta = std::fmod(theta + 2.0 * kTwoPi, kTwoPi);
            const double ob = theta / kTwoPi * kOriBins;

            const double w = mag * std::exp(-d2 / gauss_denom);

            const int u0 = static_cast<int>(std::floor(u));
            const int v0 = static_cast<int>(std::floor(v));
            const int o0 = static_cast<int>(std::floor(ob));
            const double fu = u - u0;
            const double fv = v - v0;
            const double fo = ob - o0;

            for (int du = 0; du <= 1; ++du) {
                const int ui = u0 + du;
                if (ui < 0 || ui >= kSpatialBins) continue;
                const double wu = w * (du ? fu : 1.0 - fu);
                for (int dv = 0; dv <= 1; ++dv) {
                    const int vi = v0 + dv;
                    if (vi < 0 || vi >= kSpatialBins) continue;
                    const double wv = wu * (dv ? fv : 1.0 - fv);
                    for (int dob = 0; dob <= 1; ++dob) {
                        const int oi = (o0 + dob) % kOriBins;
                        const double wo = wv * (dob ? fo : 1.0 - fo);
                        desc[(vi * kSpatialBins + ui) * kOriBins + oi] += static_cast<float>(wo);
                    }
                }
            }
        }
    }

    auto l2norm = [&desc] {
        double s = 0.0;
        for (float x : desc) s += static_cast<double>(x) * x;
        return std::sqrt(s);
    };

    double norm = l2norm();
    if (norm <= 0.0) return desc; // constant patch: stays all-zero

    for (float& x : desc) x = static_cast<float>(x / norm);
    for (float& x : desc) x = std::min(x, kClamp);
    norm = l2norm();
    if (norm > 0.0) {
        for (float& x : desc) x = static_cast<float>(x / norm);
    }
    return desc;
}

} // namespace relmap
