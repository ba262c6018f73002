#pragma once

#include "relmap/rng.hpp"
#include "relmap/svm.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace relmap {

/// Cached per-spec pairwise values over the full sample set, from which any
/// training-subset Gram can be assembled without recomputing features. For
/// hik/linear kernels the cache holds raw kernel values; for chi2 it holds
/// chi-squared distances so the bandwidth can be chosen per training subset.
struct KernelBase {
    KernelSpec spec; // kind and beta; sigma/c are calibrated per subset
    int n = 0;
    std::vector<double> cache; // n x n

    double cached(std::size_t i, std::size_t j) const { return cache[i * n + j]; }
};

KernelBase make_kernel_base(const KernelSpec& spec, const std::vector<BowVector>& features);

/// Bandwidth (chi2 only) and Hilbert normalization constant computed on the
/// given training subset only.
KernelSpec calibrate_subset(const KernelBase& base, std::span<const std::size_t> train,
                            BandwidthConvention convention);

/// Normalized, weighted kernel value beta * k(i,j) / c under a calibrated spec.
double subset_kernel_value(const KernelBase& base, const KernelSpec& calibrated,
                           std::size_t i, std::size_t j);

/// Combined Gram over `indices` using per-base calibrated specs.
KernelGram subset_gram(const std::vector<KernelBase>& bases,
                       const std::vector<KernelSpec>& calibrated,
                       std::span<const std::size_t> indices);

/// Combined kernel row between sample `j` and the training indices.
std::vector<double> subset_kernel_row(const std::vector<KernelBase>& bases,
                                      const std::vector<KernelSpec>& calibrated,
                                      std::span<const std::size_t> train, std::size_t j);

/// Class-stratified fold assignment; every fold receives approximately the
/// same class proportions. Throws when a class has fewer members than folds.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::span<const std::size_t> indices,
                                                       int k, Rng& rng);

struct CvOptions {
    int outer_folds = 10;
    int inner_folds = 9;
    std::vector<double> c_grid;  // ignored when fixed_C > 0
    double fixed_C = 0.0;
    std::uint64_t seed = 0;
    BandwidthConvention bandwidth = BandwidthConvention::InverseMeanDistance;
    SmoOptions smo;
};

struct FoldOutcome {
    int fold = 0;
    double chosen_C = 0.0;
    double bac = 0.0;
    std::vector<std::size_t> test_indices;
};

struct QuantileOutcome {
    double q = 0.0;
    std::vector<FoldOutcome> folds;
    double mean_bac = 0.0;
    std::vector<double> oof_scores; // out-of-fold score per sample
    std::vector<int> labels;
};

struct CvReport {
    std::vector<QuantileOutcome> per_quantile;
    std::size_t best_index = 0; // quantile with the highest mean balanced accuracy

    const QuantileOutcome& best() const { return per_quantile[best_index]; }
};

/// Nested cross-validation: per outer fold the regularization constant is
/// chosen by inner CV on that fold's training portion only; sigma and c are
/// recalibrated on each training subset so no test sample influences them.
CvReport nested_cv(const std::vector<KernelBase>& bases, const std::vector<double>& values,
                   const std::vector<double>& q_grid, const CvOptions& opts);

/// Plain k-fold model selection over a single training set: returns the C
/// from the grid with the highest mean validation balanced accuracy (ties go
/// to the earlier grid entry).
double select_C_cv(const std::vector<KernelBase>& bases, const std::vector<int>& labels,
                   std::span<const std::size_t> train, const std::vector<double>& c_grid,
                   int folds, std::uint64_t seed, BandwidthConvention convention,
                   const SmoOptions& smo = {});

} // namespace relmap
