#include "relmap/descriptors.hpp"
#include "relmap/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace {

relmap::RasterImage noise_image(int side, std::uint64_t seed) {
    relmap::Rng rng(seed);
    relmap::RasterImage img(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            float v = static_cast<float>(rng.uniform());
            img.set_pixel(x, y, v, v, v);
        }
    }
    return img;
}

relmap::RasterImage rotate90(const relmap::RasterImage& img) {
    // (x, y) -> (h-1-y, x): gradient vectors rotate by +90 degrees.
    int w = img.width(), h = img.height();
    relmap::RasterImage out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.set_pixel(h - 1 - y, x, img.red().at(x, y), img.green().at(x, y),
                          img.blue().at(x, y));
        }
    }
    return out;
}

} // namespace

TEST_CASE("dense keypoints: radii, stride, margin enumeration") {
    relmap::Tile tile{0, 0, 102};
    auto kps = relmap::dense_keypoints(tile, 3, {1.5, 2.0, 2.5});
    for (const auto& kp : kps) {
        if (kp.scale == 1.5) CHECK(kp.radius == doctest::Approx(9.0));
        if (kp.scale == 2.0) CHECK(kp.radius == doctest::Approx(12.0));
        if (kp.scale == 2.5) CHECK(kp.radius == doctest::Approx(15.0));
    }

    auto one = relmap::dense_keypoints(tile, 102, {2.0});
    CHECK(one.size() <= 1);

    // Enumeration oracle for radius 12, stride 3: valid centers are
    // x in {12, 15, ..., <= 89}.
    std::size_t axis = 0;
    for (int x = 12; x + 12 <= 101; x += 3) ++axis;
    auto grid = relmap::dense_keypoints(tile, 3, {2.0});
    CHECK(grid.size() == axis * axis);
    for (const auto& kp : grid) {
        CHECK(kp.x - kp.radius >= 0);
        CHECK(kp.x + kp.radius <= 101);
    }

    // Tile smaller than the disc: empty, not an error.
    CHECK(relmap::dense_keypoints(relmap::Tile{0, 0, 20}, 3, {2.0}).empty());
}

TEST_CASE("dominant orientation on ramps and rotations") {
    relmap::Plane ramp(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) ramp.at(x, y) = static_cast<float>(x) / 64.0f;
    }
    auto field = relmap::sobel_gradients(ramp);
    relmap::Keypoint kp = relmap::Keypoint::at(32, 32, 2.0);
    auto ori = relmap::dominant_orientation(field, kp);
    CHECK_FALSE(ori.degenerate);
    CHECK(ori.angle == doctest::Approx(0.0).epsilon(1e-9));

    relmap::Plane flat(64, 64, 0.5f);
    auto none = relmap::dominant_orientation(relmap::sobel_gradients(flat), kp);
    CHECK(none.degenerate);
    CHECK(none.angle == 0.0);

    auto img = noise_image(64, 99);
    auto rot = rotate90(img);
    auto f0 = relmap::sobel_gradients(img.red());
    auto f1 = relmap::sobel_gradients(rot.red());
    // Center keypoint maps onto itself under the rotation.
    auto o0 = relmap::dominant_orientation(f0, relmap::Keypoint::at(31, 31, 2.0));
    auto o1 = relmap::dominant_orientation(f1, relmap::Keypoint::at(32, 31, 2.0));
    double delta = std::fmod(o1.angle - o0.angle + 4.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    CHECK(delta == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-6));
}

TEST_CASE("sift descriptor dimensions, zero patch, norm bound") {
    auto img = noise_image(64, 5);
    relmap::FeatureConfig cfg;
    cfg.parts = {relmap::DescriptorKind::Sift};
    cfg.channels = {relmap::ColorChannel::Red, relmap::ColorChannel::Blue};
    cfg.scale = 2.0;
    cfg.grid_stride = 16;
    CHECK(cfg.dimension() == 256);

    auto ctx = relmap::make_image_context(img, cfg.channels);
    auto set = relmap::extract_tile_descriptors(ctx, cfg, relmap::Tile{0, 0, 64});
    REQUIRE(set.count() > 0);
    CHECK(set.dim == 256);
    for (std::size_t i = 0; i < set.count(); ++i) {
        auto row = set.row(i);
        double n0 = 0.0, n1 = 0.0;
        for (int d = 0; d < 128; ++d) n0 += static_cast<double>(row[d]) * row[d];
        for (int d = 128; d < 256; ++d) n1 += static_cast<double>(row[d]) * row[d];
        CHECK(std::sqrt(n0) <= 1.0 + 1e-6);
        CHECK(std::sqrt(n1) <= 1.0 + 1e-6);
    }

    relmap::Plane flat(64, 64, 0.3f);
    auto zero = relmap::sift_descriptor(relmap::sobel_gradients(flat),
                                        relmap::Keypoint::at(32, 32, 2.0), 0.0);
    for (float v : zero) CHECK(v == 0.0f);
}

TEST_CASE("sift descriptor is invariant under a 90-degree rotation") {
    auto img = noise_image(64, 1234);
    auto rot = rotate90(img);
    auto f0 = relmap::sobel_gradients(img.red());
    auto f1 = relmap::sobel_gradients(rot.red());

    relmap::Keypoint k0 = relmap::Keypoint::at(31, 31, 2.0);
    relmap::Keypoint k1 = relmap::Keypoint::at(32, 31, 2.0); // image of k0
    auto o0 = relmap::dominant_orientation(f0, k0);
    auto o1 = relmap::dominant_orientation(f1, k1);
    auto d0 = relmap::sift_descriptor(f0, k0, o0.angle);
    auto d1 = relmap::sift_descriptor(f1, k1, o1.angle);
    REQUIRE(d0.size() == d1.size());
    for (std::size_t i = 0; i < d0.size(); ++i) {
        CHECK(d0[i] == doctest::Approx(d1[i]).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("quantile estimator") {
    std::vector<double> v123 = {1, 2, 3};
    CHECK(relmap::quantile_estimate(0.5, v123) == doctest::Approx(2.0));
    std::vector<double> v2 = {0, 10};
    CHECK(relmap::quantile_estimate(0.25, v2) == doctest::Approx(2.5));
    std::vector<double> vc = {4, 4, 4, 4};
    CHECK(relmap::quantile_estimate(0.123, vc) == doctest::Approx(4.0));
    CHECK(relmap::quantile_estimate(1.0, v123) == doctest::Approx(3.0));
    CHECK_THROWS_AS(relmap::quantile_estimate(0.5, std::span<const double>{}),
                    std::invalid_argument);

    // Monotone in q, exact at the order statistics q = i/(N-1).
    relmap::Rng rng(17);
    std::vector<double> vals;
    for (int i = 0; i < 9; ++i) vals.push_back(rng.uniform(-5, 5));
    std::sort(vals.begin(), vals.end());
    double prev = -1e18;
    for (double q = 0.0; q <= 1.0; q += 0.01) {
        double e = relmap::quantile_estimate(q, vals);
        CHECK(e >= prev - 1e-12);
        prev = e;
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double q = static_cast<double>(i) / (vals.size() - 1);
        CHECK(relmap::quantile_estimate(q, vals) == doctest::Approx(vals[i]));
    }
}

TEST_CASE("quantile descriptor halves and bounds") {
    // Constant patch: every quantile equals the constant.
    relmap::Plane flat(64, 64, 0.42f);
    auto field = relmap::sobel_gradients(flat);
    auto d = relmap::quantile_descriptor(relmap::QuantileSource::Intensities, field, flat,
                                         relmap::Keypoint::at(32, 32, 2.0), 0.0);
    REQUIRE(d.size() == 18);
    for (float v : d) CHECK(v == doctest::Approx(0.42f));

    // Left half 0, right half 1: one half's quantiles near 0, the other near 1.
    relmap::Plane split(64, 64, 0.0f);
    for (int y = 0; y < 64; ++y) {
        for (int x = 32; x < 64; ++x) split.at(x, y) = 1.0f;
    }
    auto sfield = relmap::sobel_gradients(split);
    relmap::Keypoint kp = relmap::Keypoint::at(32, 32, 2.0);
    auto ori = relmap::dominant_orientation(sfield, kp);
    auto q = relmap::quantile_descriptor(relmap::QuantileSource::Intensities, sfield, split, kp,
                                         ori.angle);
    double mean_a = 0.0, mean_b = 0.0;
    for (int i = 0; i < 9; ++i) mean_a += q[i] / 9.0;
    for (int i = 9; i < 18; ++i) mean_b += q[i] / 9.0;
    CHECK(std::abs(mean_a - mean_b) > 0.9);
    CHECK(std::min(mean_a, mean_b) < 0.05);
    CHECK(std::max(mean_a, mean_b) > 0.95);

    // Intensity quantiles stay inside the patch range.
    auto img = noise_image(64, 8);
    auto nf = relmap::sobel_gradients(img.red());
    auto nq = relmap::quantile_descriptor(relmap::QuantileSource::Intensities, nf, img.red(),
                                          kp, 1.1);
    for (float v : nq) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("feature dimensionalities match the base table") {
    using DK = relmap::DescriptorKind;
    using CC = relmap::ColorChannel;
    auto dim = [](std::vector<DK> parts, std::vector<CC> ch) {
        relmap::FeatureConfig c;
        c.parts = std::move(parts);
        c.channels = std::move(ch);
        return c.dimension();
    };
    CHECK(dim({DK::Sift}, {CC::Red}) == 128);
    CHECK(dim({DK::Gnq}, {CC::Red}) == 18);
    CHECK(dim({DK::Ciq}, {CC::Red}) == 18);
    CHECK(dim({DK::Sift, DK::Gnq}, {CC::Red}) == 146);
    CHECK(dim({DK::Sift, DK::Ciq}, {CC::Red}) == 146);
    CHECK(dim({DK::Sift, DK::Ciq, DK::Gnq}, {CC::Red}) == 164);
    CHECK(dim({DK::Sift, DK::Gnq}, {CC::Red, CC::Blue}) == 292);
    CHECK(dim({DK::Sift}, {CC::Red, CC::Blue}) == 256);
}

TEST_CASE("metric weights: std normalization and block scaling") {
    relmap::DescriptorSet set;
    set.dim = 5; // two blocks: 2 + 3 dims
    set.kind = "test";
    relmap::Rng rng(23);
    for (int i = 0; i < 400; ++i) {
        std::vector<float> row = {static_cast<float>(rng.normal(0, 2.0)),
                                  static_cast<float>(rng.normal(5, 0.5)),
                                  static_cast<float>(rng.normal(-1, 4.0)),
                                  static_cast<float>(rng.normal(0, 1.0)),
                                  1.0f}; // constant dimension
        set.append(relmap::Keypoint{}, row);
    }
    auto mw = relmap::compute_metric_weights(set, {2, 3});
    REQUIRE(mw.w.size() == 5);
    CHECK(mw.zeroed_dims == 1);
    CHECK(mw.w[4] == 0.0f);
    CHECK(mw.w[0] == doctest::Approx(1.0 / (2.0 * 2)).epsilon(0.1));
    CHECK(mw.w[1] == doctest::Approx(1.0 / (0.5 * 2)).epsilon(0.1));
    CHECK(mw.w[2] == doctest::Approx(1.0 / (4.0 * 3)).epsilon(0.1));
    CHECK(mw.w[3] == doctest::Approx(1.0 / (1.0 * 3)).epsilon(0.1));
}

TEST_CASE("descriptor serialization round trip") {
    auto img = noise_image(40, 31);
    relmap::FeatureConfig cfg;
    cfg.parts = {relmap::DescriptorKind::Gnq};
    cfg.channels = {relmap::ColorChannel::Grey};
    cfg.scale = 1.5;
    cfg.grid_stride = 7;
    auto ctx = relmap::make_image_context(img, cfg.channels);
    auto set = relmap::extract_tile_descriptors(ctx, cfg, relmap::Tile{0, 0, 40});
    REQUIRE(set.count() > 0);

    auto path = std::filesystem::temp_directory_path() / "relmap_desc_test.rdsc";
    relmap::write_descriptors(path, set);
    auto back = relmap::read_descriptors(path);
    CHECK(back.kind == set.kind);
    CHECK(back.dim == set.dim);
    CHECK(back.values == set.values);
    REQUIRE(back.count() == set.count());
    CHECK(back.keypoints[0].x == doctest::Approx(set.keypoints[0].x));
    std::filesystem::remove(path);
}
