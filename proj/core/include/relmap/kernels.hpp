#pragma once

#include "relmap/codebook.hpp"

#include <span>
#include <string>
#include <vector>

namespace relmap {

enum class KernelKind { Hik, Chi2, Linear };

std::string kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);

/// Convention for turning the mean pairwise chi-squared distance mu into the
/// exponent factor sigma. The default maps an average pair to exp(-1); the
/// alternative uses the mean distance itself as sigma.
enum class BandwidthConvention { InverseMeanDistance, MeanDistance };

struct KernelSpec {
    KernelKind kind = KernelKind::Hik;
    double sigma = 0.0; // chi2 only
    double beta = 1.0;  // weight in the kernel sum
    double c = 0.0;     // Hilbert-space std normalization; 0 = uncalibrated

    bool calibrated() const { return c > 0.0; }
};

double hik_eval(std::span<const double> x, std::span<const double> z);
double linear_eval(std::span<const double> x, std::span<const double> z);

/// sum over d with x_d + z_d > 0 of (x_d - z_d)^2 / (x_d + z_d).
double chi2_distance(std::span<const double> x, std::span<const double> z);
double chi2_eval(std::span<const double> x, std::span<const double> z, double sigma);

/// Unnormalized kernel value under the spec (sigma used for chi2).
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z);

/// Bandwidth from the mean pairwise chi2 distance over a sample. Samples
/// larger than max_vectors are thinned to evenly spaced vectors first.
/// Throws when the mean distance is zero (all vectors identical).
double estimate_bandwidth(const std::vector<BowVector>& sample,
                          BandwidthConvention convention = BandwidthConvention::InverseMeanDistance,
                          std::size_t max_vectors = 2000);

/// Symmetric kernel matrix over n samples.
struct KernelGram {
    int n = 0;
    std::vector<double> values; // n x n row-major

    KernelGram() = default;
    explicit KernelGram(int size) : n(size), values(static_cast<std::size_t>(size) * size, 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// Raw (unnormalized) Gram of one kernel over the features.
KernelGram gram_raw(const KernelSpec& spec, const std::vector<BowVector>& features);

/// Hilbert-space standard deviation of a training Gram:
/// c = mean diagonal - mean of all entries.
double hilbert_constant(const KernelGram& gram);

/// Computes c over the training Gram and divides every entry by it. Throws
/// for degenerate kernels (c <= 1e-12).
std::pair<double, KernelGram> hilbert_normalize(const KernelGram& gram);

/// Per-sample feature bundle: one BowVector per kernel spec.
using MultiBow = std::vector<BowVector>;

/// Weighted sum of normalized kernels: sum_u beta_u K_u / c_u. Every spec
/// must be calibrated. features_per_spec[u][i] is feature u of sample i.
KernelGram gram_build(const std::vector<KernelSpec>& specs,
                      const std::vector<std::vector<BowVector>>& features_per_spec);

/// Combined kernel row between test point x and all training samples, using
/// the training-time normalization constants.
std::vector<double> kernel_row(const std::vector<KernelSpec>& specs,
                               const std::vector<std::vector<BowVector>>& train_features_per_spec,
                               const MultiBow& x);

/// Combined kernel value between two feature bundles.
double kernel_value(const std::vector<KernelSpec>& specs, const MultiBow& a, const MultiBow& b);

} // namespace relmap
