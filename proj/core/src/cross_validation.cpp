#include "relmap/cross_validation.hpp"

#include "relmap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relmap {

KernelBase make_kernel_base(const KernelSpec& spec, const std::vector<BowVector>& features) {
    KernelBase base;
    base.spec = spec;
    base.n = static_cast<int>(features.size());
    base.cache.resize(static_cast<std::size_t>(base.n) * base.n);
    const bool is_chi2 = spec.kind == KernelKind::Chi2;
    parallel_for(features.size(), [&](std::size_t i) {
        for (std::size_t j = i; j < features.size(); ++j) {
            double v = is_chi2 ? chi2_distance(features[i].values, features[j].values)
                               : kernel_eval(spec, features[i].values, features[j].values);
            base.cache[i * base.n + j] = v;
            base.cache[j * base.n + i] = v;
        }
    });
    return base;
}

KernelSpec calibrate_subset(const KernelBase& base, std::span<const std::size_t> train,
                            BandwidthConvention convention) {
    if (train.size() < 2) throw std::invalid_argument("calibrate_subset: need >= 2 samples");
    KernelSpec spec = base.spec;
    if (spec.kind == KernelKind::Chi2) {
        double total = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < train.size(); ++a) {
            for (std::size_t b = a + 1; b < train.size(); ++b) {
                total += base.cached(train[a], train[b]);
                ++pairs;
            }
        }
        double mean = total / static_cast<double>(pairs);
        if (mean <= 0.0) {
            throw std::invalid_argument("calibrate_subset: all training vectors identical");
        }
        spec.sigma = convention == BandwidthConvention::InverseMeanDistance ? 1.0 / mean : mean;
    }

    auto value = [&](std::size_t i, std::size_t j) {
        double v = base.cached(i, j);
        return spec.kind == KernelKind::Chi2 ? std::exp(-spec.sigma * v) : v;
    };
    double diag = 0.0, all = 0.0;
    for (std::size_t a = 0; a < train.size(); ++a) {
        diag += value(train[a], train[a]);
        for (std::size_t b = 0; b < train.size(); ++b) all += value(train[a], train[b]);
    }
    double n = static_cast<double>(train.size());
    double c = diag / n - all / (n * n);
    if (c <= 1e-12) {
        throw std::invalid_argument("calibrate_subset: degenerate kernel (c <= 1e-12)");
    }
    spec.c = c;
    return spec;
}

double subset_kernel_value(const KernelBase& base, const KernelSpec& calibrated,
                           std::size_t i, std::size_t j) {
    double v = base.cached(i, j);
    if (calibrated.kind == KernelKind::Chi2) v = std::exp(-calibrated.sigma * v);
    return calibrated.beta / calibrated.c * v;
}

KernelGram subset_gram(const std::vector<KernelBase>& bases,
                       const std::vector<KernelSpec>& calibrated,
                       std::span<const std::size_t> indices) {
    const int n = static_cast<int>(indices.size());
    KernelGram gram(n);
    for (std::size_t u = 0; u < bases.size(); ++u) {
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                double v = subset_kernel_value(bases[u], calibrated[u], indices[a], indices[b]);
                gram.at(a, b) += v;
                if (a != b) gram.at(b, a) += v;
            }
        }
    }
    return gram;
}

std::vector<double> subset_kernel_row(const std::vector<KernelBase>& bases,
                                      const std::vector<KernelSpec>& calibrated,
                                      std::span<const std::size_t> train, std::size_t j) {
    std::vector<double> row(train.size(), 0.0);
    for (std::size_t u = 0; u < bases.size(); ++u) {
        for (std::size_t a = 0; a < train.size(); ++a) {
            row[a] += subset_kernel_value(bases[u], calibrated[u], train[a], j);
        }
    }
    return row;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::span<const std::size_t> indices,
                                                       int k, Rng& rng) {
    if (k < 2) throw std::invalid_argument("stratified_folds: need k >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t idx : indices) {
        (labels[idx] > 0 ? pos : neg).push_back(idx);
    }
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument(
            "stratified_folds: a class has fewer members than folds; use fewer folds or a "
            "less extreme quantile");
    }
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
    return folds;
}

namespace {

std::vector<std::size_t> complement(std::span<const std::size_t> all,
                                    const std::vector<std::size_t>& held_out) {
    std::vector<std::size_t> out;
    out.reserve(all.size() - held_out.size());
    std::vector<bool> drop_mark;
    std::size_t max_idx = 0;
    for (std::size_t i : all) max_idx = std::max(max_idx, i);
    drop_mark.assign(max_idx + 1, false);
    for (std::size_t i : held_out) drop_mark[i] = true;
    for (std::size_t i : all) {
        if (!drop_mark[i]) out.push_back(i);
    }
    return out;
}

struct TrainedFold {
    TrainedSvm model;
    std::vector<KernelSpec> calibrated;
    std::vector<std::size_t> train;
};

TrainedFold train_on(const std::vector<KernelBase>& bases, const std::vector<int>& labels,
                     std::vector<std::size_t> train, double C, BandwidthConvention convention,
                     const SmoOptions& smo) {
    TrainedFold tf;
    tf.train = std::move(train);
    tf.calibrated.reserve(bases.size());
    for (const KernelBase& base : bases) {
        tf.calibrated.push_back(calibrate_subset(base, tf.train, convention));
    }
    KernelGram gram = subset_gram(bases, tf.calibrated, tf.train);
    std::vector<int> y(tf.train.size());
    for (std::size_t a = 0; a < tf.train.size(); ++a) y[a] = labels[tf.train[a]];
    tf.model = smo_train(gram, y, C, smo);
    tf.model.specs = tf.calibrated;
    return tf;
}

double score_sample(const std::vector<KernelBase>& bases, const TrainedFold& tf, std::size_t j) {
    return decision_value(tf.model, subset_kernel_row(bases, tf.calibrated, tf.train, j));
}

} // namespace

double select_C_cv(const std::vector<KernelBase>& bases, const std::vector<int>& labels,
                   std::span<const std::size_t> train, const std::vector<double>& c_grid,
                   int folds, std::uint64_t seed, BandwidthConvention convention,
                   const SmoOptions& smo) {
    if (c_grid.empty()) throw std::invalid_argument("select_C_cv: empty C grid");
    Rng rng(seed);
    auto fold_sets = stratified_folds(labels, train, folds, rng);

    double best_C = c_grid[0];
    double best_bac = -1.0;
    for (double C : c_grid) {
        double bac_sum = 0.0;
        for (const auto& val_set : fold_sets) {
            std::vector<std::size_t> fit_set = complement(train, val_set);
            TrainedFold tf = train_on(bases, labels, fit_set, C, convention, smo);
            std::vector<double> scores;
            std::vector<int> y_val;
            scores.reserve(val_set.size());
            for (std::size_t j : val_set) {
                scores.push_back(score_sample(bases, tf, j));
                y_val.push_back(labels[j]);
            }
            bac_sum += balanced_accuracy(scores, y_val);
        }
        double mean_bac = bac_sum / fold_sets.size();
        if (mean_bac > best_bac) {
            best_bac = mean_bac;
            best_C = C;
        }
    }
    return best_C;
}

CvReport nested_cv(const std::vector<KernelBase>& bases, const std::vector<double>& values,
                   const std::vector<double>& q_grid, const CvOptions& opts) {
    if (bases.empty()) throw std::invalid_argument("nested_cv: no kernels");
    if (q_grid.empty()) throw std::invalid_argument("nested_cv: empty quantile grid");
    const std::size_t n = values.size();
    if (n < static_cast<std::size_t>(opts.outer_folds)) {
        throw std::invalid_argument("nested_cv: fewer samples than outer folds");
    }
    if (opts.fixed_C <= 0.0 && opts.c_grid.empty()) {
        throw std::invalid_argument("nested_cv: need a C grid or a fixed C");
    }

    Rng root(opts.seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    CvReport report;
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
        QuantileOutcome out;
        out.q = q_grid[qi];
        out.labels = threshold_labels(values, out.q);
        out.oof_scores.assign(n, 0.0);

        Rng rng = root.substream("outer", qi);
        auto outer = stratified_folds(out.labels, all, opts.outer_folds, rng);

        // Outer test sets must partition the samples.
        std::size_t covered = 0;
        for (const auto& f : outer) covered += f.size();
        if (covered != n) throw std::logic_error("nested_cv: outer folds do not partition");

        double bac_sum = 0.0;
        for (int f = 0; f < opts.outer_folds; ++f) {
            std::vector<std::size_t> train = complement(all, outer[f]);
            double C = opts.fixed_C;
            if (C <= 0.0) {
                C = select_C_cv(bases, out.labels, train, opts.c_grid, opts.inner_folds,
                                derive_seed(opts.seed, "inner", qi * 1000 + f), opts.bandwidth,
                                opts.smo);
            }
            TrainedFold tf = train_on(bases, out.labels, std::move(train), C, opts.bandwidth,
                                      opts.smo);

            FoldOutcome fo;
            fo.fold = f;
            fo.chosen_C = C;
            fo.test_indices = outer[f];
            std::vector<double> scores;
            std::vector<int> y_test;
            for (std::size_t j : outer[f]) {
                double s = score_sample(bases, tf, j);
                out.oof_scores[j] = s;
                scores.push_back(s);
                y_test.push_back(out.labels[j]);
            }
            fo.bac = balanced_accuracy(scores, y_test);
            bac_sum += fo.bac;
            out.folds.push_back(std::move(fo));
        }
        out.mean_bac = bac_sum / opts.outer_folds;
        report.per_quantile.push_back(std::move(out));
    }

    report.best_index = 0;
    for (std::size_t qi = 1; qi < report.per_quantile.size(); ++qi) {
        if (report.per_quantile[qi].mean_bac > report.per_quantile[report.best_index].mean_bac) {
            report.best_index = qi;
        }
    }
    return report;
}

} // namespace relmap
