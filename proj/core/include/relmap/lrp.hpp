#pragma once

#include "relmap/svm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relmap {

/// Relevance r_{d,u} per BoW dimension d of feature u. For the hik-exact
/// method the entries sum to f(x) exactly.
struct DimensionRelevance {
    std::vector<std::vector<double>> r; // r[u][d]
    std::string method;                 // "hik-exact" or "chi2-taylor"

    double total() const;
};

/// SVM decision for a feature bundle via the training kernel rows.
double model_decision(const TrainedSvm& model,
                      const std::vector<std::vector<BowVector>>& train_features, const MultiBow& x);

/// Closed-form relevance decomposition for HIK models:
/// r_{d,u}(x) = b beta_u / (sum_u' beta_u' D_u') + beta_u sum_i alpha_i y_i
/// min(x_i^(d), x^(d)), with the Hilbert normalization folded into beta.
/// Throws when any kernel is not HIK.
DimensionRelevance hik_relevance(const TrainedSvm& model,
                                 const std::vector<std::vector<BowVector>>& train_features,
                                 const MultiBow& x);

/// Backprojection of whole-image relevance onto tiles when the image BoW is
/// the mean of (non-empty) tile BoWs: each tile dimension receives relevance
/// proportional to its contribution, uniformly when the image dimension is
/// zero. The per-tile scores average back to the input exactly.
std::vector<std::vector<double>> spread_to_tiles(const std::vector<double>& r_dims,
                                                 const BowVector& image_bow,
                                                 const std::vector<BowVector>& tile_bows);

struct RootPoint {
    MultiBow x0;
    double residual = 0.0; // |f(x0)|
    std::size_t candidate_index = 0;
    double hilbert_distance = 0.0;
    std::size_t candidates_used = 0;
    std::size_t candidates_requested = 0;
};

struct RootSearchOptions {
    std::size_t max_candidates = 30;
    double tol = 1e-6;
    int max_bisect = 60;
};

/// Root of the decision function on lines from x to opposite-sign candidates.
/// Each line alpha x + (1-alpha) v_i is bisected to |f| < tol; the winner
/// minimizes the kernel-induced Hilbert distance to x. Candidates whose
/// prediction sign matches x, or whose bisection stalls, are skipped; throws
/// only when none is usable.
RootPoint chi2_root_point(const TrainedSvm& model,
                          const std::vector<std::vector<BowVector>>& train_features,
                          const MultiBow& x, const std::vector<MultiBow>& candidates,
                          const RootSearchOptions& opts = {});

/// First-order Taylor relevance around the root point:
/// r_{d,u} = beta_u (f(x0) / (V_u |beta|_1)
///           + (x-x0)^(d,u) sum_i alpha_i y_i dk_u(x_i,.)/dx^(d,u)|_{x0}).
/// Kernels must be differentiable (chi2 or linear). The chi2 partial
/// derivative contributes 0 where x_d + x_{i,d} = 0.
DimensionRelevance chi2_taylor_relevance(const TrainedSvm& model,
                                         const std::vector<std::vector<BowVector>>& train_features,
                                         const MultiBow& x, const RootPoint& x0,
                                         double root_tolerance = 1e-5);

/// Redistribution of one tile/feature's dimension relevance onto its local
/// features (eq. weights m_d(l) / sum_i m_d(i), 0/0 := 0); dimensions no
/// feature maps onto are spread uniformly. When the tile has no local
/// features the total goes to `background` so conservation still holds.
struct LocalRelevance {
    std::vector<double> per_feature;
    double background = 0.0;

    double total() const;
};

LocalRelevance local_feature_relevance(const std::vector<double>& r_dims,
                                       const std::vector<WordMapping>& mappings);

} // namespace relmap
