#pragma once

#include "relmap/descriptors.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace relmap {

/// Visual vocabulary: k cluster centers plus the diagonal metric weights they
/// were clustered under. Centers are stored in the metric-scaled space
/// (identical to descriptor space when all weights are 1), so lookups scale
/// the query by `weights` and use plain l2.
struct Vocabulary {
    std::string kind;   // producing FeatureConfig name
    int dim = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<float> centers; // k x dim row-major, metric-scaled space
    std::vector<float> weights; // dim

    std::span<const float> center(int j) const {
        return {centers.data() + static_cast<std::size_t>(j) * dim, static_cast<std::size_t>(dim)};
    }
};

struct KmeansOptions {
    int max_iters = 100;
    double rel_tol = 1e-6; // stop when relative distortion change drops below
    std::uint64_t seed = 0;
};

/// Lloyd's algorithm under the weighted l2 metric with k-means++ seeding.
/// Deterministic for a fixed seed. Throws if there are fewer distinct points
/// than k.
Vocabulary kmeans_train(const DescriptorSet& descriptors, const MetricWeights& metric, int k,
                        const KmeansOptions& opts);

/// Rank-weighted soft assignment of one local feature: weight 2^-rank for the
/// `cutoff` nearest words (rank 1 = nearest), 0 elsewhere. Distance ties are
/// broken by lower word index.
struct WordMapping {
    std::array<std::uint32_t, 8> word{};
    std::array<float, 8> weight{};
    int count = 0;
};

WordMapping rank_soft_map(std::span<const float> descriptor, const Vocabulary& vocab,
                          int cutoff = 4);

std::vector<WordMapping> rank_soft_map_all(const DescriptorSet& set, const Vocabulary& vocab,
                                           int cutoff = 4);

/// l1-normalized Bag-of-Words histogram. A tile with no keypoints produces an
/// all-zero vector with the empty flag set.
struct BowVector {
    std::vector<double> values;
    bool empty = false;

    double l1() const;
};

BowVector bow_from_tile(const std::vector<WordMapping>& mappings, int vocabulary_size);

/// Arithmetic mean of tile BoW vectors, skipping empty-flagged tiles. Throws
/// when every tile is empty.
BowVector average_bow(const std::vector<BowVector>& tile_bows);

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::filesystem::path& path);

} // namespace relmap
