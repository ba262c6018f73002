#pragma once

#include "relmap/image.hpp"
#include "relmap/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace relmap {

enum class ShapeKind { Circle, Ellipse, Square };

struct Shape {
    ShapeKind kind = ShapeKind::Circle;
    double cx = 0.0;
    double cy = 0.0;
    double a = 0.0;     // circle radius / half side / ellipse semi-axis 1
    double b = 0.0;     // ellipse semi-axis 2 (unused otherwise)
    double angle = 0.0; // ellipse rotation, radians in [0, pi)
};

/// Generation parameters for the synthetic shapes world.
struct SceneConfig {
    int image_side = 300;
    double shape_count_mean = 15.0;   // total shapes ~ N(15, 2), clamped >= 1
    double shape_count_sd = 2.0;
    double square_side_mean = 20.0;   // squares: side ~ N(20, 1)
    double square_side_sd = 1.0;
    double circle_radius_mean = 10.0; // circles: radius ~ N(10, 1)
    double circle_radius_sd = 1.0;
    double ellipse_r1_mean = 10.0;    // ellipses: one axis fixed at 10,
    double ellipse_r1_sd = 0.0;       // the other ~ N(15, 1)
    double ellipse_r2_mean = 15.0;
    double ellipse_r2_sd = 1.0;
    double circle_free_fraction = 1.0 / 3.0;
    double circle_ratio_min = 0.10;
    double circle_ratio_max = 1.00;
    // Probability that a non-circle shape is an ellipse (vs a square).
    double ellipse_fraction = 0.5;
    double blur_sigma = 1.0;          // 5x5 Gaussian kernel
    double noise_amplitude = 1.0 / 255.0; // uniform in [-1,+1] on the 8-bit scale
    double score_weight_ellipse = 0.6;
    double score_weight_circle = 0.3;
    double score_weight_square = 0.0;
    double score_noise_max = 0.1;     // each noise term uniform in [0, 0.1)
};

struct Scene {
    std::vector<Shape> shapes;
    RasterImage image;
    double score = 0.0;       // noisy molecular score
    double score_clean = 0.0; // same score with all noise terms zeroed
    Plane mask;               // ground truth: ellipse 1, circle 0.5, else 0

    std::size_t count(ShapeKind kind) const;
};

/// Shape list sampling only (count, kinds, geometry, placement); used by
/// generate_scene and cheap enough for distributional tests.
std::vector<Shape> sample_scene_shapes(const SceneConfig& cfg, Rng& rng);

/// Full scene: shapes rendered gray with black edges on white, 5x5 Gaussian
/// blur, per-pixel uniform noise, molecular score and ground-truth mask.
/// Bit-identical for a fixed rng stream.
Scene generate_scene(const SceneConfig& cfg, Rng& rng);

/// Weighted shape-count score: sum_i (a_i |s_i| + eps_i) + eps with
/// eps terms uniform in [0, 0.1). The noise inputs are passed explicitly so
/// the clean variant and tests can zero them.
double molecular_score(const SceneConfig& cfg, const std::vector<Shape>& shapes,
                       const double noise_terms[4]);

/// Ellipse pixels 1, circle pixels 0.5, background 0; overlaps keep the
/// maximum value.
Plane ground_truth_map(const SceneConfig& cfg, const std::vector<Shape>& shapes);

struct SyntheticDataset {
    std::vector<Scene> train;
    std::vector<Scene> test;
    std::vector<int> train_labels;      // median split of noisy scores
    std::vector<int> test_labels;       // median split of noisy test scores
    std::vector<int> test_labels_clean; // median split of noise-free test scores
};

/// Nested training sets (the first n scenes of a fixed per-index stream, so
/// the 100-scene set is a prefix of the 500-scene set) plus an independent
/// test set. Labels are the 50% score quantile of each dataset.
SyntheticDataset build_dataset(int n_train, int n_test, std::uint64_t seed,
                               const SceneConfig& cfg = {});

/// Writes scenes as PNG + JSON sidecar (shapes, scores, label) and masks as
/// f32 rasters; labels are collected in labels.csv.
void export_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset);

} // namespace relmap
