#pragma once

#include "relmap/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace relmap {

/// Dual SVM solution. The decision function over a combined, normalized
/// kernel row k_i = sum_u beta_u k_u(x_i, x) / c_u is
/// f(x) = b + sum_i alpha_i y_i k_i.
struct TrainedSvm {
    std::vector<double> alpha;
    std::vector<int> y; // +1 / -1
    double b = 0.0;
    double C = 1.0;
    std::vector<KernelSpec> specs;
    std::vector<std::string> sample_ids; // lineage, optional
    // Training BoW features per spec ([u][i]); optional, embedded in the
    // model file so scoring and relevance need no re-encoding of the
    // training set.
    std::vector<std::vector<BowVector>> train_features;

    std::size_t size() const { return alpha.size(); }
    double dual_objective(const KernelGram& gram) const;
};

struct SmoOptions {
    double tol = 1e-3;
    std::uint64_t max_pair_updates = 10'000'000;
};

/// Sequential minimal optimization with maximal-KKT-violating-pair selection.
/// Throws on single-class labels and on non-convergence at the update cap.
TrainedSvm smo_train(const KernelGram& gram, const std::vector<int>& y, double C,
                     const SmoOptions& opts = {});

double decision_value(const TrainedSvm& model, std::span<const double> kernel_row);

/// Binary labels from a quantile threshold: strictly above -> +1, otherwise
/// (including ties) -> -1. Throws when either class would be empty.
std::vector<int> threshold_labels(const std::vector<double>& values, double q);
double quantile_threshold(const std::vector<double>& values, double q);

/// Mean of true positive and true negative rate; sign(0) counts as -1.
double balanced_accuracy(const std::vector<double>& scores, const std::vector<int>& labels);

struct TailAccuracy {
    double acc_neg = 0.0;
    std::size_t n_neg = 0;
    double acc_pos = 0.0;
    std::size_t n_pos = 0;
};

/// Accuracies restricted to the score tails {f <= -t} and {f >= +t}. Empty
/// tails report size 0 with accuracy 0 (not an error).
TailAccuracy tail_accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                           double t);

struct SurvivalLabels {
    std::vector<std::size_t> uncensored; // indices into the input arrays
    std::vector<int> labels;             // one per uncensored index
};

/// +1 when survival time exceeds the cutoff (months), -1 otherwise; censored
/// samples are excluded (they are scored by a designated fold model later).
SurvivalLabels survival_labels(const std::vector<double>& times,
                               const std::vector<bool>& censored, double cutoff_months = 60.0);

void write_model(const std::filesystem::path& path, const TrainedSvm& model);
TrainedSvm read_model(const std::filesystem::path& path);

} // namespace relmap
