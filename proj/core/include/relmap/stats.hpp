#pragma once

#include "relmap/rng.hpp"

#include <cstdint>
#include <vector>

namespace relmap {

/// Outcome of a single statistical test. p-values too small for double
/// precision are reported through log10_p (p then underflows to 0); report
/// writers print "<1e-300"-style bounds instead of 0.
struct TestResult {
    double statistic = 0.0;
    double p = 1.0;
    double log10_p = 0.0;
    double n_eff = 0.0; // effective sample size where applicable
};

/// One-gene test of balanced accuracy against chance:
/// p = exp(-max(bac-0.5, 0)^2 * 8 q (1-q) n), n_eff = 4 q (1-q) n.
TestResult hoeffding_pvalue(double bac, std::size_t n, double q);

struct BhResult {
    std::vector<double> thresholds;      // alpha * k / K per ascending rank
    std::vector<std::size_t> step_up;    // indices into the input, standard rule
    std::vector<std::size_t> first_violation; // literal count-until-violated rule
};

/// Benjamini-Hochberg FDR control. Reports both the standard step-up rule
/// (largest k with p_(k) <= alpha k/K marks ranks 1..k) and the stricter
/// variant that stops at the first violated rank. The step-up set always
/// contains the first-violation set.
BhResult benjamini_hochberg(const std::vector<double>& pvalues, double alpha);

/// Upper bound on the false discovery rate at balanced-accuracy threshold t:
/// min(1, P(bac >= t | permuted) / P(bac >= t | true)). Throws when the true
/// tail is empty ("no discoveries at threshold").
double monte_carlo_fdr(const std::vector<double>& true_bacs,
                       const std::vector<double>& permuted_bacs, double t);

/// Seed-reproducible uniform permutation of the values (same multiset out).
std::vector<double> permute_labels(const std::vector<double>& values, std::uint64_t seed);

/// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct SpearmanPermutation {
    double r = 0.0;
    double r_binned = 0.0;
    double p = 1.0;
    int bins = 0;
    std::vector<double> permuted_r; // full permutation trace, for audits
};

/// Correlation between a binary indicator and scores with a permutation test:
/// the p-value is the percentile rank of r among n_perm permuted-score
/// correlations. The binned variant averages indicator and scores within
/// equal-count bins (by score order) before correlating.
SpearmanPermutation spearman_permutation(const std::vector<int>& indicator,
                                         const std::vector<double>& scores, int n_perm,
                                         int bins, std::uint64_t seed);

/// Survival function of the chi-squared distribution with 1 degree of
/// freedom, with a log10 tail usable far below double underflow.
TestResult chi2_sf_1df(double statistic);

} // namespace relmap
