#include "relmap/svm.hpp"

#include "relmap/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>

namespace relmap {

double TrainedSvm::dual_objective(const KernelGram& gram) const {
    // (1/2) a^T Q a - e^T a with Q_ij = y_i y_j K_ij.
    double quad = 0.0;
    double lin = 0.0;
    const int n = static_cast<int>(alpha.size());
    for (int i = 0; i < n; ++i) {
        if (alpha[i] == 0.0) continue;
        lin += alpha[i];
        for (int j = 0; j < n; ++j) {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram.at(i, j);
        }
    }
    return 0.5 * quad - lin;
}

TrainedSvm smo_train(const KernelGram& gram, const std::vector<int>& y, double C,
                     const SmoOptions& opts) {
    const int n = gram.n;
    if (static_cast<int>(y.size()) != n) {
        throw std::invalid_argument("smo_train: label count does not match Gram size");
    }
    if (C <= 0.0) throw std::invalid_argument("smo_train: C must be > 0");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == +1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw std::invalid_argument("smo_train: labels must be +1/-1");
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("smo_train: both classes must be present");
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of the dual at alpha = 0

    auto in_up = [&](int t) { return (y[t] == +1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](int t) { return (y[t] == +1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };

    std::uint64_t updates = 0;
    double gap_m = 0.0, gap_M = 0.0;
    while (true) {
        int i = -1, j = -1;
        gap_m = -std::numeric_limits<double>::infinity();
        gap_M = std::numeric_limits<double>::infinity();
        for (int t = 0; t < n; ++t) {
            double v = -y[t] * grad[t];
            if (in_up(t) && v > gap_m) {
                gap_m = v;
                i = t;
            }
            if (in_low(t) && v < gap_M) {
                gap_M = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gap_m - gap_M <= opts.tol) break;
        if (++updates > opts.max_pair_updates) {
            throw std::runtime_error("smo_train: no convergence after " +
                                     std::to_string(opts.max_pair_updates) +
                                     " pair updates (KKT gap " + std::to_string(gap_m - gap_M) + ")");
        }

        // Step along alpha_i += y_i * t, alpha_j -= y_j * t, which keeps
        // y^T alpha constant.
        double eta = gram.at(i, i) + gram.at(j, j) - 2.0 * gram.at(i, j);
        double step = gap_m - gap_M; // > tol here
        if (eta > 1e-12) step /= eta;
        else step = std::numeric_limits<double>::infinity(); // flat direction: go to a bound

        double bound = std::numeric_limits<double>::infinity();
        bound = std::min(bound, y[i] == +1 ? C - alpha[i] : alpha[i]);
        bound = std::min(bound, y[j] == +1 ? alpha[j] : C - alpha[j]);
        step = std::min(step, bound);
        if (!(step > 0.0)) break; // numerically stuck at a vertex

        alpha[i] += y[i] * step;
        alpha[j] -= y[j] * step;
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        double di = y[i] * step, dj = -y[j] * step;
        for (int t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * gram.at(t, i) * di + y[j] * gram.at(t, j) * dj);
        }
    }

    TrainedSvm model;
    model.alpha = std::move(alpha);
    model.y = y;
    model.C = C;

    // Bias from free support vectors; fall back to the violation interval midpoint.
    double sum_b = 0.0;
    int n_free = 0;
    const double margin = 1e-8 * C;
    for (int t = 0; t < n; ++t) {
        if (model.alpha[t] > margin && model.alpha[t] < C - margin) {
            sum_b += -y[t] * grad[t];
            ++n_free;
        }
    }
    model.b = n_free > 0 ? sum_b / n_free : 0.5 * (gap_m + gap_M);
    return model;
}

double decision_value(const TrainedSvm& model, std::span<const double> kernel_row) {
    if (kernel_row.size() != model.alpha.size()) {
        throw std::invalid_argument("decision_value: kernel row length mismatch");
    }
    double f = model.b;
    for (std::size_t i = 0; i < kernel_row.size(); ++i) {
        if (model.alpha[i] != 0.0) f += model.alpha[i] * model.y[i] * kernel_row[i];
    }
    return f;
}

double quantile_threshold(const std::vector<double>& values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile_threshold: empty values");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    return quantile_estimate(q, sorted);
}

std::vector<int> threshold_labels(const std::vector<double>& values, double q) {
    if (q <= 0.0 || q >= 1.0) {
        throw std::invalid_argument("threshold_labels: q must be in (0,1)");
    }
    double thr = quantile_threshold(values, q);
    std::vector<int> labels(values.size());
    int n_pos = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels[i] = values[i] > thr ? +1 : -1; // ties go below
        if (labels[i] > 0) ++n_pos;
    }
    if (n_pos == 0 || n_pos == static_cast<int>(values.size())) {
        throw std::invalid_argument("threshold_labels: one class is empty at this quantile");
    }
    return labels;
}

double balanced_accuracy(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("balanced_accuracy: size mismatch");
    }
    std::size_t n_pos = 0, n_neg = 0, tp = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int pred = scores[i] > 0.0 ? +1 : -1;
        if (labels[i] == +1) {
            ++n_pos;
            if (pred == +1) ++tp;
        } else {
            ++n_neg;
            if (pred == -1) ++tn;
        }
    }
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("balanced_accuracy: one class is absent");
    }
    return 0.5 * (static_cast<double>(tp) / n_pos + static_cast<double>(tn) / n_neg);
}

TailAccuracy tail_accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                           double t) {
    if (t < 0.0) throw std::invalid_argument("tail_accuracy: t must be >= 0");
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("tail_accuracy: size mismatch");
    }
    TailAccuracy out;
    std::size_t ok_neg = 0, ok_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] <= -t) {
            ++out.n_neg;
            if (labels[i] == -1) ++ok_neg;
        }
        // At t = 0 a zero score predicts -1, so it belongs to the negative
        // tail only; the tails then partition the samples by sign.
        if (t == 0.0 ? scores[i] > 0.0 : scores[i] >= t) {
            ++out.n_pos;
            if (labels[i] == +1) ++ok_pos;
        }
    }
    out.acc_neg = out.n_neg ? static_cast<double>(ok_neg) / out.n_neg : 0.0;
    out.acc_pos = out.n_pos ? static_cast<double>(ok_pos) / out.n_pos : 0.0;
    return out;
}

SurvivalLabels survival_labels(const std::vector<double>& times,
                               const std::vector<bool>& censored, double cutoff_months) {
    if (times.size() != censored.size()) {
        throw std::invalid_argument("survival_labels: size mismatch");
    }
    SurvivalLabels out;
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (censored[i]) continue;
        out.uncensored.push_back(i);
        int label = times[i] > cutoff_months ? +1 : -1;
        out.labels.push_back(label);
        (label > 0 ? has_pos : has_neg) = true;
    }
    if (out.uncensored.empty()) {
        throw std::invalid_argument("survival_labels: no uncensored samples");
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("survival_labels: need uncensored samples in both classes");
    }
    return out;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_exact(std::FILE* f, const void* p, std::size_t bytes) {
    if (std::fwrite(p, 1, bytes, f) != bytes) throw std::runtime_error("short write");
}

void read_exact(std::FILE* f, void* p, std::size_t bytes) {
    if (std::fread(p, 1, bytes, f) != bytes) throw std::runtime_error("short read");
}

void write_string(std::FILE* f, const std::string& s) {
    std::uint32_t len = static_cast<std::uint32_t>(s.size());
    write_exact(f, &len, 4);
    write_exact(f, s.data(), len);
}

std::string read_string(std::FILE* f) {
    std::uint32_t len = 0;
    read_exact(f, &len, 4);
    std::string s(len, '\0');
    read_exact(f, s.data(), len);
    return s;
}

} // namespace

void write_model(const std::filesystem::path& path, const TrainedSvm& model) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open model for writing: " + path.string());
    write_exact(fp.get(), "RSVM", 4);
    std::uint32_t version = 1;
    std::uint64_t n = model.alpha.size();
    write_exact(fp.get(), &version, 4);
    write_exact(fp.get(), &n, 8);
    write_exact(fp.get(), &model.b, 8);
    write_exact(fp.get(), &model.C, 8);
    write_exact(fp.get(), model.alpha.data(), n * 8);
    for (int v : model.y) {
        std::int8_t b = static_cast<std::int8_t>(v);
        write_exact(fp.get(), &b, 1);
    }
    std::uint32_t n_specs = static_cast<std::uint32_t>(model.specs.size());
    write_exact(fp.get(), &n_specs, 4);
    for (const KernelSpec& s : model.specs) {
        write_string(fp.get(), kernel_kind_name(s.kind));
        write_exact(fp.get(), &s.sigma, 8);
        write_exact(fp.get(), &s.beta, 8);
        write_exact(fp.get(), &s.c, 8);
    }
    std::uint64_t n_ids = model.sample_ids.size();
    write_exact(fp.get(), &n_ids, 8);
    for (const std::string& id : model.sample_ids) write_string(fp.get(), id);

    std::uint32_t n_feat_specs = static_cast<std::uint32_t>(model.train_features.size());
    write_exact(fp.get(), &n_feat_specs, 4);
    for (const auto& feats : model.train_features) {
        std::uint64_t count = feats.size();
        std::uint32_t dim = feats.empty() ? 0 : static_cast<std::uint32_t>(feats[0].values.size());
        write_exact(fp.get(), &count, 8);
        write_exact(fp.get(), &dim, 4);
        for (const BowVector& bow : feats) {
            if (bow.values.size() != dim) {
                throw std::invalid_argument("write_model: inconsistent feature dimensions");
            }
            write_exact(fp.get(), bow.values.data(), dim * 8);
        }
    }
}

TrainedSvm read_model(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open model for reading: " + path.string());
    char magic[4];
    read_exact(fp.get(), magic, 4);
    if (std::memcmp(magic, "RSVM", 4) != 0) {
        throw std::runtime_error("bad model magic in " + path.string());
    }
    std::uint32_t version = 0;
    std::uint64_t n = 0;
    read_exact(fp.get(), &version, 4);
    if (version != 1) throw std::runtime_error("unsupported model version");
    TrainedSvm model;
    read_exact(fp.get(), &n, 8);
    read_exact(fp.get(), &model.b, 8);
    read_exact(fp.get(), &model.C, 8);
    model.alpha.resize(n);
    read_exact(fp.get(), model.alpha.data(), n * 8);
    model.y.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int8_t b = 0;
        read_exact(fp.get(), &b, 1);
        model.y[i] = b;
    }
    std::uint32_t n_specs = 0;
    read_exact(fp.get(), &n_specs, 4);
    model.specs.resize(n_specs);
    for (KernelSpec& s : model.specs) {
        s.kind = kernel_kind_from_name(read_string(fp.get()));
        read_exact(fp.get(), &s.sigma, 8);
        read_exact(fp.get(), &s.beta, 8);
        read_exact(fp.get(), &s.c, 8);
    }
    std::uint64_t n_ids = 0;
    read_exact(fp.get(), &n_ids, 8);
    model.sample_ids.resize(n_ids);
    for (std::uint64_t i = 0; i < n_ids; ++i) model.sample_ids[i] = read_string(fp.get());

    std::uint32_t n_feat_specs = 0;
    read_exact(fp.get(), &n_feat_specs, 4);
    model.train_features.resize(n_feat_specs);
    for (auto& feats : model.train_features) {
        std::uint64_t count = 0;
        std::uint32_t dim = 0;
        read_exact(fp.get(), &count, 8);
        read_exact(fp.get(), &dim, 4);
        feats.resize(count);
        for (BowVector& bow : feats) {
            bow.values.resize(dim);
            read_exact(fp.get(), bow.values.data(), dim * 8);
        }
    }
    return model;
}

} // namespace relmap
