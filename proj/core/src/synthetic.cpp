#include "relmap/synthetic.hpp"

#include "relmap/svm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace relmap {

std::size_t Scene::count(ShapeKind kind) const {
    std::size_t c = 0;
    for (const Shape& s : shapes) {
        if (s.kind == kind) ++c;
    }
    return c;
}

namespace {

double bounding_radius(const Shape& s) {
    switch (s.kind) {
        case ShapeKind::Circle: return s.a;
        case ShapeKind::Square: return s.a; // half side covers the axis extent
        case ShapeKind::Ellipse: return std::max(s.a, s.b);
    }
    return 0.0;
}

bool inside_shape(const Shape& s, double px, double py) {
    double dx = px - s.cx;
    double dy = py - s.cy;
    switch (s.kind) {
        case ShapeKind::Circle:
            return dx * dx + dy * dy <= s.a * s.a;
        case ShapeKind::Square:
            return std::abs(dx) <= s.a && std::abs(dy) <= s.a;
        case ShapeKind::Ellipse: {
            double u = std::cos(s.angle) * dx + std::sin(s.angle) * dy;
            double v = -std::sin(s.angle) * dx + std::cos(s.angle) * dy;
            return (u * u) / (s.a * s.a) + (v * v) / (s.b * s.b) <= 1.0;
        }
    }
    return false;
}

bool on_edge(const Shape& s, double px, double py) {
    if (!inside_shape(s, px, py)) return false;
    double dx = px - s.cx;
    double dy = py - s.cy;
    switch (s.kind) {
        case ShapeKind::Circle: {
            double inner = std::max(s.a - 1.0, 0.0);
            return dx * dx + dy * dy > inner * inner;
        }
        case ShapeKind::Square: {
            double inner = std::max(s.a - 1.0, 0.0);
            return std::abs(dx) > inner || std::abs(dy) > inner;
        }
        case ShapeKind::Ellipse: {
            double ia = std::max(s.a - 1.0, 1e-6);
            double ib = std::max(s.b - 1.0, 1e-6);
            double u = std::cos(s.angle) * dx + std::sin(s.angle) * dy;
            double v = -std::sin(s.angle) * dx + std::cos(s.angle) * dy;
            return (u * u) / (ia * ia) + (v * v) / (ib * ib) > 1.0;
        }
    }
    return false;
}

} // namespace

std::vector<Shape> sample_scene_shapes(const SceneConfig& cfg, Rng& rng) {
    const int n = std::max(1, static_cast<int>(std::lround(
                                  rng.normal(cfg.shape_count_mean, cfg.shape_count_sd))));

    int n_circles = 0;
    if (rng.uniform() >= cfg.circle_free_fraction) {
        double ratio = rng.uniform(cfg.circle_ratio_min, cfg.circle_ratio_max);
        n_circles = std::clamp(static_cast<int>(std::lround(ratio * n)), 0, n);
    }

    std::vector<ShapeKind> kinds(n_circles, ShapeKind::Circle);
    for (int i = n_circles; i < n; ++i) {
        kinds.push_back(rng.uniform() < cfg.ellipse_fraction ? ShapeKind::Ellipse
                                                             : ShapeKind::Square);
    }

    std::vector<Shape> shapes;
    shapes.reserve(n);
    const double side = cfg.image_side;
    for (ShapeKind kind : kinds) {
        Shape s;
        s.kind = kind;
        for (int attempt = 0;; ++attempt) {
            switch (kind) {
                case ShapeKind::Circle:
                    s.a = std::max(1.0, rng.normal(cfg.circle_radius_mean, cfg.circle_radius_sd));
                    break;
                case ShapeKind::Square:
                    // a stores the half side.
                    s.a = std::max(1.0, rng.normal(cfg.square_side_mean, cfg.square_side_sd)) / 2.0;
                    break;
                case ShapeKind::Ellipse:
                    s.a = std::max(1.0, rng.normal(cfg.ellipse_r1_mean, cfg.ellipse_r1_sd));
                    s.b = std::max(1.0, rng.normal(cfg.ellipse_r2_mean, cfg.ellipse_r2_sd));
                    s.angle = rng.uniform(0.0, std::numbers::pi);
                    break;
            }
            double extent = bounding_radius(s);
            if (2.0 * extent < side) {
                s.cx = rng.uniform(extent, side - extent);
                s.cy = rng.uniform(extent, side - extent);
                break;
            }
            if (attempt >= 1000) {
                throw std::runtime_error("sample_scene_shapes: shape cannot be placed");
            }
        }
        shapes.push_back(s);
    }
    return shapes;
}

double molecular_score(const SceneConfig& cfg, const std::vector<Shape>& shapes,
                       const double noise_terms[4]) {
    std::size_t n_circle = 0, n_ellipse = 0, n_square = 0;
    for (const Shape& s : shapes) {
        switch (s.kind) {
            case ShapeKind::Circle: ++n_circle; break;
            case ShapeKind::Ellipse: ++n_ellipse; break;
            case ShapeKind::Square: ++n_square; break;
        }
    }
    double score = 0.0;
    score += cfg.score_weight_ellipse * static_cast<double>(n_ellipse) + noise_terms[0];
    score += cfg.score_weight_circle * static_cast<double>(n_circle) + noise_terms[1];
    score += cfg.score_weight_square * static_cast<double>(n_square) + noise_terms[2];
    score += noise_terms[3];
    return score;
}

Plane ground_truth_map(const SceneConfig& cfg, const std::vector<Shape>& shapes) {
    Plane mask(cfg.image_side, cfg.image_side, 0.0f);
    for (const Shape& s : shapes) {
        if (s.kind == ShapeKind::Square) continue;
        const float value = s.kind == ShapeKind::Ellipse ? 1.0f : 0.5f;
        const int r = static_cast<int>(std::ceil(bounding_radius(s)));
        const int x0 = std::max(0, static_cast<int>(s.cx) - r);
        const int x1 = std::min(cfg.image_side - 1, static_cast<int>(s.cx) + r);
        const int y0 = std::max(0, static_cast<int>(s.cy) - r);
        const int y1 = std::min(cfg.image_side - 1, static_cast<int>(s.cy) + r);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (inside_shape(s, x, y)) {
                    mask.at(x, y) = std::max(mask.at(x, y), value);
                }
            }
        }
    }
    return mask;
}

namespace {

Plane render_shapes(const SceneConfig& cfg, const std::vector<Shape>& shapes) {
    Plane img(cfg.image_side, cfg.image_side, 1.0f); // white background
    const float fill = 128.0f / 255.0f;
    for (const Shape& s : shapes) {
        const int r = static_cast<int>(std::ceil(bounding_radius(s)));
        const int x0 = std::max(0, static_cast<int>(s.cx) - r);
        const int x1 = std::min(cfg.image_side - 1, static_cast<int>(s.cx) + r);
        const int y0 = std::max(0, static_cast<int>(s.cy) - r);
        const int y1 = std::min(cfg.image_side - 1, static_cast<int>(s.cy) + r);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (!inside_shape(s, x, y)) continue;
                img.at(x, y) = on_edge(s, x, y) ? 0.0f : fill;
            }
        }
    }
    return img;
}

Plane gaussian_blur_5x5(const Plane& src, double sigma) {
    // Separable 5-tap kernel with replicate padding.
    double w[5];
    double total = 0.0;
    for (int i = -2; i <= 2; ++i) {
        w[i + 2] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += w[i + 2];
    }
    for (double& v : w) v /= total;

    const int width = src.width, height = src.height;
    Plane tmp(width, height), out(width, height);
    auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            for (int i = -2; i <= 2; ++i) s += w[i + 2] * src.at(clampi(x + i, width - 1), y);
            tmp.at(x, y) = static_cast<float>(s);
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            for (int i = -2; i <= 2; ++i) s += w[i + 2] * tmp.at(x, clampi(y + i, height - 1));
            out.at(x, y) = static_cast<float>(s);
        }
    }
    return out;
}

} // namespace

Scene generate_scene(const SceneConfig& cfg, Rng& rng) {
    Scene scene;
    scene.shapes = sample_scene_shapes(cfg, rng);

    Plane grey = gaussian_blur_5x5(render_shapes(cfg, scene.shapes), cfg.blur_sigma);
    for (float& v : grey.values) {
        double noisy = v + rng.uniform(-1.0, 1.0) * cfg.noise_amplitude;
        v = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
    }
    scene.image = RasterImage(grey, grey, grey);

    double noise[4];
    for (double& t : noise) t = rng.uniform(0.0, cfg.score_noise_max);
    const double zero[4] = {0.0, 0.0, 0.0, 0.0};
    scene.score = molecular_score(cfg, scene.shapes, noise);
    scene.score_clean = molecular_score(cfg, scene.shapes, zero);
    scene.mask = ground_truth_map(cfg, scene.shapes);
    return scene;
}

SyntheticDataset build_dataset(int n_train, int n_test, std::uint64_t seed,
                               const SceneConfig& cfg) {
    if (n_train < 2 || n_test < 2) {
        throw std::invalid_argument("build_dataset: need at least 2 train and test scenes");
    }
    Rng root(seed);
    SyntheticDataset ds;
    ds.train.reserve(n_train);
    ds.test.reserve(n_test);
    for (int i = 0; i < n_train; ++i) {
        Rng rng = root.substream("train-scene", static_cast<std::uint64_t>(i));
        ds.train.push_back(generate_scene(cfg, rng));
    }
    for (int i = 0; i < n_test; ++i) {
        Rng rng = root.substream("test-scene", static_cast<std::uint64_t>(i));
        ds.test.push_back(generate_scene(cfg, rng));
    }

    auto scores = [](const std::vector<Scene>& scenes, bool clean) {
        std::vector<double> v;
        v.reserve(scenes.size());
        for (const Scene& s : scenes) v.push_back(clean ? s.score_clean : s.score);
        return v;
    };
    ds.train_labels = threshold_labels(scores(ds.train, false), 0.5);
    ds.test_labels = threshold_labels(scores(ds.test, false), 0.5);
    ds.test_labels_clean = threshold_labels(scores(ds.test, true), 0.5);
    return ds;
}

namespace {

nlohmann::json shape_json(const Shape& s) {
    nlohmann::json j;
    switch (s.kind) {
        case ShapeKind::Circle: j["kind"] = "circle"; break;
        case ShapeKind::Ellipse: j["kind"] = "ellipse"; break;
        case ShapeKind::Square: j["kind"] = "square"; break;
    }
    j["cx"] = s.cx;
    j["cy"] = s.cy;
    j["a"] = s.a;
    if (s.kind == ShapeKind::Ellipse) {
        j["b"] = s.b;
        j["angle"] = s.angle;
    }
    return j;
}

void export_split(const std::filesystem::path& dir, const std::vector<Scene>& scenes,
                  const std::vector<int>& labels, const std::string& split,
                  std::ofstream& labels_csv) {
    std::filesystem::create_directories(dir);
    char name[64];
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        std::snprintf(name, sizeof(name), "%s_%05zu", split.c_str(), i);
        const Scene& s = scenes[i];
        write_png(dir / (std::string(name) + ".png"), s.image);
        write_raster(dir / (std::string(name) + "_mask.ras"), s.mask);

        nlohmann::json j;
        j["score"] = s.score;
        j["score_clean"] = s.score_clean;
        j["label"] = labels[i];
        j["shapes"] = nlohmann::json::array();
        for (const Shape& sh : s.shapes) j["shapes"].push_back(shape_json(sh));
        std::ofstream(dir / (std::string(name) + ".json")) << j.dump(2) << '\n';

        labels_csv << name << ',' << split << ',' << s.score << ',' << s.score_clean << ','
                   << labels[i] << '\n';
    }
}

} // namespace

void export_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset) {
    std::filesystem::create_directories(dir);
    std::ofstream labels_csv(dir / "labels.csv");
    if (!labels_csv) throw std::runtime_error("cannot write labels.csv under " + dir.string());
    labels_csv << "id,split,score,score_clean,label\n";
    export_split(dir / "train", dataset.train, dataset.train_labels, "train", labels_csv);
    export_split(dir / "test", dataset.test, dataset.test_labels, "test", labels_csv);
}

} // namespace relmap
