#pragma once

#include "relmap/cross_validation.hpp"
#include "relmap/heatmap.hpp"
#include "relmap/lrp.hpp"
#include "relmap/quadrat.hpp"
#include "relmap/survival.hpp"
#include "relmap/synthetic.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace relmap {

enum class TaskKind { Cancer, Lymphocyte, Molecular, Survival, Synthetic };

std::string task_name(TaskKind t);
TaskKind task_from_name(const std::string& name);

/// One Bag-of-Words feature: local-feature config plus vocabulary size.
struct FeatureSpec {
    FeatureConfig config;
    int vocabulary = 510;
};

struct PipelineConfig {
    TaskKind task = TaskKind::Synthetic;
    std::uint64_t seed = 42;

    std::filesystem::path images_dir; // unused for synthetic
    std::filesystem::path labels_csv;
    std::filesystem::path run_dir = "run";

    int tile_side = 102;
    int tile_stride = 34;
    bool average_tiles = false; // mean tile BoW per image (molecular-style)

    std::vector<FeatureSpec> features;
    KernelKind kernel = KernelKind::Hik;
    BandwidthConvention bandwidth = BandwidthConvention::InverseMeanDistance;

    double fixed_C = 0.0;         // > 0 skips the C search
    std::vector<double> c_grid;
    int outer_folds = 10;
    int inner_folds = 9;
    int select_folds = 5;         // plain k-fold C selection (synthetic)
    std::vector<double> q_grid;

    double codebook_image_fraction = 0.3;
    double codebook_feature_fraction = 0.3;
    int kmeans_max_iters = 100;
    int map_cutoff = 4;

    bool heatmaps = true;
    TileNormalization tile_normalization = TileNormalization::PerTileThenGlobal;
    double heatmap_overlay_alpha = 0.6;
    double quadrat_threshold = 0.0;  // heatmap pixels above this count as signal
    double quadrat_fraction = 0.10;  // quadrat side as fraction of image width

    int n_train = 100; // synthetic only
    int n_test = 100;
    SceneConfig scene; // synthetic generator parameters
    double survival_cutoff = 60.0; // months
};

/// Reads a JSON config file and applies the task template (missing fields get
/// the task defaults; templates pin the feature/kernel combinations).
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json_text(const std::string& text);

/// Task template: the paper-pinned feature sets, kernels and CV protocol per
/// task, applied to fields the user left unset.
void apply_task_template(PipelineConfig& cfg);

/// Validation beyond the template (paths exist, parameters consistent).
/// Throws std::invalid_argument with a message naming the offending field.
void validate_config(const PipelineConfig& cfg);

std::string resolved_config_text(const PipelineConfig& cfg);

struct SampleTable {
    std::vector<std::string> ids;
    std::vector<std::filesystem::path> images;
    std::vector<double> values;
    // survival CSVs only:
    std::vector<bool> censored;
};

/// CSV columns (id, value) resolved against the image directory
/// (<id>.png). Errors name the offending row.
SampleTable load_labeled_dataset(const std::filesystem::path& images_dir,
                                 const std::filesystem::path& labels_csv);

/// CSV columns (id, time_months, censored 0/1).
SampleTable load_survival_dataset(const std::filesystem::path& images_dir,
                                  const std::filesystem::path& labels_csv);

/// Per-image encoding for all configured features: tile BoWs, mappings and
/// keypoints (kept for relevance backprojection).
struct EncodedImage {
    std::vector<Tile> tiles;
    // [feature][tile]
    std::vector<std::vector<BowVector>> tile_bows;
    std::vector<std::vector<std::vector<WordMapping>>> tile_mappings;
    std::vector<std::vector<std::vector<Keypoint>>> tile_keypoints;
    MultiBow image_bow; // per feature; averaged over tiles when configured
};

EncodedImage encode_image(const RasterImage& img, const PipelineConfig& cfg,
                          const std::vector<Vocabulary>& vocabs);

/// Vocabulary training with the configured image/descriptor subsampling.
std::vector<Vocabulary> train_codebooks(const PipelineConfig& cfg,
                                        const std::vector<const RasterImage*>& images);

/// Kernel value cache keyed by a content hash of (spec, features):
/// magic "RGRM", u64 key, u32 n, n*n f64 values.
void write_kernel_cache(const std::filesystem::path& path, const KernelBase& base,
                        const std::vector<BowVector>& features);

/// Whole-image heatmap for per-tile classification tasks: every grid tile is
/// scored and decomposed on its own (HIK closed form, or chi2 Taylor around a
/// root point found on lines to opposite-sign tiles of the same image), then
/// tile maps are fused. The model must carry embedded training features.
Plane slide_heatmap(const RasterImage& img, const PipelineConfig& cfg,
                    const std::vector<Vocabulary>& vocabs, const TrainedSvm& model);

struct PipelineResult {
    std::filesystem::path run_dir;
    double mean_bac = 0.0;
    double bac_clean = 0.0; // synthetic ground-truth-label accuracy
    double chosen_C = 0.0;
    double best_q = 0.0;
    QuadratTable pooled_quadrats;
    TestResult quadrat_test_result;
    std::optional<LogRankResult> logrank;
};

/// Runs the full task pipeline under cfg.run_dir (layout: config.resolved,
/// vocab/, grams/, models/, reports/, heatmaps/). Any stage error aborts with
/// the stage name; outputs written so far are kept.
PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace relmap
