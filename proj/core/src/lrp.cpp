#include "relmap/lrp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relmap {

double DimensionRelevance::total() const {
    double s = 0.0;
    for (const auto& ru : r) {
        for (double v : ru) s += v;
    }
    return s;
}

double LocalRelevance::total() const {
    double s = background;
    for (double v : per_feature) s += v;
    return s;
}

double model_decision(const TrainedSvm& model,
                      const std::vector<std::vector<BowVector>>& train_features,
                      const MultiBow& x) {
    return decision_value(model, kernel_row(model.specs, train_features, x));
}

DimensionRelevance hik_relevance(const TrainedSvm& model,
                                 const std::vector<std::vector<BowVector>>& train_features,
                                 const MultiBow& x) {
    const std::size_t n_specs = model.specs.size();
    if (train_features.size() != n_specs || x.size() != n_specs) {
        throw std::invalid_argument("hik_relevance: feature bundle mismatch");
    }
    for (const KernelSpec& s : model.specs) {
        if (s.kind != KernelKind::Hik) {
            throw std::invalid_argument("hik_relevance: model must use HIK kernels only");
        }
        if (!s.calibrated()) throw std::invalid_argument("hik_relevance: uncalibrated spec");
    }

    // Effective weights include the Hilbert normalization of each kernel.
    std::vector<double> eff(n_specs);
    double beta_dim_sum = 0.0;
    for (std::size_t u = 0; u < n_specs; ++u) {
        eff[u] = model.specs[u].beta / model.specs[u].c;
        beta_dim_sum += eff[u] * static_cast<double>(x[u].values.size());
    }

    DimensionRelevance rel;
    rel.method = "hik-exact";
    rel.r.resize(n_specs);
    const std::size_t n = model.alpha.size();
    for (std::size_t u = 0; u < n_specs; ++u) {
        const std::size_t dims = x[u].values.size();
        rel.r[u].assign(dims, model.b * eff[u] / beta_dim_sum);
        for (std::size_t i = 0; i < n; ++i) {
            if (model.alpha[i] == 0.0) continue;
            const double coef = eff[u] * model.alpha[i] * model.y[i];
            const auto& xi = train_features[u][i].values;
            for (std::size_t d = 0; d < dims; ++d) {
                rel.r[u][d] += coef * std::min(xi[d], x[u].values[d]);
            }
        }
    }
    return rel;
}

std::vector<std::vector<double>> spread_to_tiles(const std::vector<double>& r_dims,
                                                 const BowVector& image_bow,
                                                 const std::vector<BowVector>& tile_bows) {
    const std::size_t dims = r_dims.size();
    if (image_bow.values.size() != dims) {
        throw std::invalid_argument("spread_to_tiles: dimension mismatch");
    }
    std::size_t populated = 0;
    for (const BowVector& t : tile_bows) {
        if (!t.empty) ++populated;
    }
    if (populated == 0) throw std::invalid_argument("spread_to_tiles: all tiles empty");

    std::vector<std::vector<double>> out(tile_bows.size());
    for (std::size_t t = 0; t < tile_bows.size(); ++t) {
        out[t].assign(dims, 0.0);
        if (tile_bows[t].empty) continue;
        for (std::size_t d = 0; d < dims; ++d) {
            if (image_bow.values[d] > 0.0) {
                out[t][d] = r_dims[d] * tile_bows[t].values[d] / image_bow.values[d];
            } else {
                out[t][d] = r_dims[d]; // uniform under the mean
            }
        }
    }
    return out;
}

namespace {

MultiBow lerp_bundle(const MultiBow& a, const MultiBow& b, double alpha) {
    // alpha=1 -> a, alpha=0 -> b.
    MultiBow out(a.size());
    for (std::size_t u = 0; u < a.size(); ++u) {
        out[u].values.resize(a[u].values.size());
        for (std::size_t d = 0; d < a[u].values.size(); ++d) {
            out[u].values[d] = alpha * a[u].values[d] + (1.0 - alpha) * b[u].values[d];
        }
    }
    return out;
}

} // namespace

RootPoint chi2_root_point(const TrainedSvm& model,
                          const std::vector<std::vector<BowVector>>& train_features,
                          const MultiBow& x, const std::vector<MultiBow>& candidates,
                          const RootSearchOptions& opts) {
    if (candidates.empty()) {
        throw std::invalid_argument("chi2_root_point: no candidates supplied");
    }
    const double fx = model_decision(model, train_features, x);
    const std::size_t use = std::min(opts.max_candidates, candidates.size());

    RootPoint best;
    best.hilbert_distance = std::numeric_limits<double>::infinity();
    best.candidates_requested = opts.max_candidates;
    std::size_t usable = 0;

    for (std::size_t ci = 0; ci < use; ++ci) {
        const MultiBow& v = candidates[ci];
        double fv = model_decision(model, train_features, v);
        if (!(fx * fv < 0.0)) continue; // not an opposite-sign candidate
        ++usable;

        // Bisection on the segment alpha in [0,1]; f(1)=fx, f(0)=fv.
        double lo = 0.0, hi = 1.0;
        double f_hi = fx;
        double alpha_mid = 0.5, f_mid = 0.0;
        bool found = false;
        for (int it = 0; it < opts.max_bisect; ++it) {
            alpha_mid = 0.5 * (lo + hi);
            f_mid = model_decision(model, train_features, lerp_bundle(x, v, alpha_mid));
            if (std::abs(f_mid) < opts.tol) {
                found = true;
                break;
            }
            if (f_mid * f_hi > 0.0) {
                hi = alpha_mid;
            } else {
                lo = alpha_mid;
                // f_lo sign stays opposite to f_hi
            }
        }
        if (!found) continue; // numerics: skip this candidate

        MultiBow x0 = lerp_bundle(x, v, alpha_mid);
        double dist = 0.0;
        for (std::size_t u = 0; u < model.specs.size(); ++u) {
            const KernelSpec& s = model.specs[u];
            double kxx = kernel_eval(s, x[u].values, x[u].values);
            double kx0 = kernel_eval(s, x[u].values, x0[u].values);
            double k00 = kernel_eval(s, x0[u].values, x0[u].values);
            dist += s.beta / s.c * (kxx - 2.0 * kx0 + k00);
        }
        if (dist < best.hilbert_distance) {
            best.x0 = std::move(x0);
            best.residual = std::abs(f_mid);
            best.candidate_index = ci;
            best.hilbert_distance = dist;
        }
    }

    if (usable == 0) {
        throw std::invalid_argument("chi2_root_point: no opposite-sign candidates");
    }
    if (best.x0.empty()) {
        throw std::runtime_error("chi2_root_point: bisection failed on every candidate");
    }
    best.candidates_used = usable;
    return best;
}

namespace {

double kernel_partial(const KernelSpec& spec, std::span<const double> xi,
                      std::span<const double> x0, std::size_t d) {
    switch (spec.kind) {
        case KernelKind::Linear:
            return xi[d];
        case KernelKind::Chi2: {
            double sum = x0[d] + xi[d];
            if (sum <= 0.0) return 0.0;
            double k = chi2_eval(x0, xi, spec.sigma);
            // d/dx of (x-a)^2/(x+a) = (x-a)(x+3a)/(x+a)^2 with a = xi[d].
            double diff = x0[d] - xi[d];
            double grad_dist = diff * (x0[d] + 3.0 * xi[d]) / (sum * sum);
            return -spec.sigma * grad_dist * k;
        }
        case KernelKind::Hik:
            break;
    }
    throw std::invalid_argument("chi2_taylor_relevance: kernel is not differentiable");
}

} // namespace

DimensionRelevance chi2_taylor_relevance(const TrainedSvm& model,
                                         const std::vector<std::vector<BowVector>>& train_features,
                                         const MultiBow& x, const RootPoint& x0,
                                         double root_tolerance) {
    const std::size_t n_specs = model.specs.size();
    if (train_features.size() != n_specs || x.size() != n_specs || x0.x0.size() != n_specs) {
        throw std::invalid_argument("chi2_taylor_relevance: feature bundle mismatch");
    }
    if (x0.residual > root_tolerance) {
        throw std::invalid_argument("chi2_taylor_relevance: root point residual above tolerance");
    }

    const double f0 = model_decision(model, train_features, x0.x0);
    std::vector<double> eff(n_specs);
    double eff_l1 = 0.0;
    for (std::size_t u = 0; u < n_specs; ++u) {
        eff[u] = model.specs[u].beta / model.specs[u].c;
        eff_l1 += std::abs(eff[u]);
    }

    DimensionRelevance rel;
    rel.method = "chi2-taylor";
    rel.r.resize(n_specs);
    const std::size_t n = model.alpha.size();
    for (std::size_t u = 0; u < n_specs; ++u) {
        const std::size_t dims = x[u].values.size();
        const double bias_spread = f0 / (static_cast<double>(dims) * eff_l1);
        rel.r[u].assign(dims, 0.0);
        for (std::size_t d = 0; d < dims; ++d) {
            double grad = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (model.alpha[i] == 0.0) continue;
                grad += model.alpha[i] * model.y[i] *
                        kernel_partial(model.specs[u], train_features[u][i].values,
                                       x0.x0[u].values, d);
            }
            double delta = x[u].values[d] - x0.x0[u].values[d];
            rel.r[u][d] = eff[u] * (bias_spread + delta * grad);
        }
    }
    return rel;
}

LocalRelevance local_feature_relevance(const std::vector<double>& r_dims,
                                       const std::vector<WordMapping>& mappings) {
    LocalRelevance out;
    const std::size_t n_feat = mappings.size();
    double total = 0.0;
    for (double v : r_dims) total += v;
    if (n_feat == 0) {
        out.background = total; // conservation fallback for featureless tiles
        return out;
    }

    std::vector<double> mass(r_dims.size(), 0.0);
    for (const WordMapping& m : mappings) {
        for (int k = 0; k < m.count; ++k) mass[m.word[k]] += m.weight[k];
    }

    double unmapped = 0.0; // relevance of dimensions no feature maps onto
    for (std::size_t d = 0; d < r_dims.size(); ++d) {
        if (mass[d] <= 0.0) unmapped += r_dims[d];
    }

    out.per_feature.assign(n_feat, unmapped / static_cast<double>(n_feat));
    for (std::size_t l = 0; l < n_feat; ++l) {
        const WordMapping& m = mappings[l];
        for (int k = 0; k < m.count; ++k) {
            std::size_t d = m.word[k];
            if (mass[d] > 0.0) {
                out.per_feature[l] += r_dims[d] * m.weight[k] / mass[d];
            }
        }
    }
    return out;
}

} // namespace relmap
