#pragma once

#include "relmap/gradients.hpp"
#include "relmap/image.hpp"
#include "relmap/keypoints.hpp"
#include "relmap/tiling.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace relmap {

enum class DescriptorKind { Sift, Gnq, Ciq };

std::string kind_name(DescriptorKind k);
DescriptorKind kind_from_name(const std::string& name);

/// Dimensionality of one kind over a single color channel
/// (sift 128, gnq 18, ciq 18).
int kind_dimension(DescriptorKind k);

/// One local-feature type: a (possibly concatenated) descriptor computed over
/// an ordered channel set at a single scale. Each FeatureConfig yields one
/// Bag-of-Words feature downstream.
struct FeatureConfig {
    std::vector<DescriptorKind> parts;
    std::vector<ColorChannel> channels;
    double scale = 2.0;
    int grid_stride = 3;

    int dimension() const;
    /// Dimensions of each concatenated block, channel-major then part,
    /// e.g. sift+gnq over (red, blue) -> {128, 18, 128, 18}.
    std::vector<int> block_dims() const;
    std::string name() const;
};

/// Fixed-dimension descriptor batch for one FeatureConfig; values are stored
/// row-major, one row per keypoint.
struct DescriptorSet {
    std::string kind;   // FeatureConfig::name() of the producer
    int dim = 0;
    std::vector<Keypoint> keypoints;
    std::vector<float> values;

    std::size_t count() const { return keypoints.size(); }
    std::span<const float> row(std::size_t i) const {
        return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    void append(const Keypoint& kp, std::span<const float> v);
};

/// Per-image precomputed channel planes and gradient fields. The dominant
/// orientation is always estimated on the grey-channel gradients so all
/// channels of one keypoint share a frame.
struct ImageContext {
    std::vector<Plane> planes;            // one per FeatureConfig channel, in order
    std::vector<GradientField> fields;    // gradients of those planes
    GradientField grey_field;             // orientation reference
};

ImageContext make_image_context(const RasterImage& img, const std::vector<ColorChannel>& channels);

/// Linear-interpolation quantile estimator over sorted values:
/// I = q(N-1), result = (1-frac(I)) V[floor(I)] + frac(I) V[floor(I)+1]
/// (0-indexed), with q = 1 returning the maximum.
double quantile_estimate(double q, std::span<const double> sorted_values);

/// 4x4x8 SIFT descriptor over the keypoint disc, rotated into the dominant
/// orientation frame. Gaussian window sigma = radius/2, trilinear binning,
/// clamp at 0.2 then renormalize. Returns all zeros for constant patches.
std::vector<float> sift_descriptor(const GradientField& field, const Keypoint& kp,
                                   double orientation);

enum class QuantileSource { GradientNorms, Intensities };

/// 18 quantile values (9 per half circle) of gradient norms or intensities.
/// The disc is split by the line through the center orthogonal to the
/// orientation; pixels on the line join the half on the positive side.
std::vector<float> quantile_descriptor(QuantileSource source, const GradientField& field,
                                       const Plane& plane, const Keypoint& kp,
                                       double orientation);

/// All descriptors of one tile under the config; keypoints whose disc does
/// not fit inside the tile are dropped by dense_keypoints.
DescriptorSet extract_tile_descriptors(const ImageContext& ctx, const FeatureConfig& cfg,
                                       const Tile& tile);

/// Diagonal metric used to cluster concatenated descriptors: each dimension
/// is divided by its standard deviation over the training sample, then scaled
/// by 1 / (dimensionality of its block). Dimensions with zero deviation get
/// weight 0.
struct MetricWeights {
    std::vector<float> w;
    int zeroed_dims = 0;
};

MetricWeights compute_metric_weights(const DescriptorSet& sample, const std::vector<int>& block_dims);

/// Uniform weights (plain l2) for single-kind descriptors.
MetricWeights unit_metric_weights(int dim);

void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set);
DescriptorSet read_descriptors(const std::filesystem::path& path);

} // namespace relmap
