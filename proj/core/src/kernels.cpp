#include "relmap/kernels.hpp"

#include "relmap/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace relmap {

std::string kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Hik: return "hik";
        case KernelKind::Chi2: return "chi2";
        case KernelKind::Linear: return "linear";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "hik") return KernelKind::Hik;
    if (name == "chi2") return KernelKind::Chi2;
    if (name == "linear") return KernelKind::Linear;
    throw std::invalid_argument("unknown kernel kind: " + name);
}

namespace {

void check_dims(std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size()) {
        throw std::invalid_argument("kernel: dimension mismatch");
    }
}

} // namespace

double hik_eval(std::span<const double> x, std::span<const double> z) {
    check_dims(x, z);
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) s += std::min(x[d], z[d]);
    return s;
}

double linear_eval(std::span<const double> x, std::span<const double> z) {
    check_dims(x, z);
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) s += x[d] * z[d];
    return s;
}

double chi2_distance(std::span<const double> x, std::span<const double> z) {
    check_dims(x, z);
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        double sum = x[d] + z[d];
        if (sum > 0.0) {
            double diff = x[d] - z[d];
            s += diff * diff / sum;
        }
    }
    return s;
}

double chi2_eval(std::span<const double> x, std::span<const double> z, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("chi2_eval: sigma must be > 0");
    return std::exp(-sigma * chi2_distance(x, z));
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z) {
    switch (spec.kind) {
        case KernelKind::Hik: return hik_eval(x, z);
        case KernelKind::Chi2: return chi2_eval(x, z, spec.sigma);
        case KernelKind::Linear: return linear_eval(x, z);
    }
    return 0.0;
}

double estimate_bandwidth(const std::vector<BowVector>& sample,
                          BandwidthConvention convention, std::size_t max_vectors) {
    if (sample.size() < 2) {
        throw std::invalid_argument("estimate_bandwidth: need at least 2 vectors");
    }
    std::vector<const BowVector*> sel;
    if (sample.size() <= max_vectors) {
        for (const auto& v : sample) sel.push_back(&v);
    } else {
        for (std::size_t i = 0; i < max_vectors; ++i) {
            sel.push_back(&sample[i * sample.size() / max_vectors]);
        }
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        for (std::size_t j = i + 1; j < sel.size(); ++j) {
            total += chi2_distance(sel[i]->values, sel[j]->values);
            ++pairs;
        }
    }
    double mean = total / static_cast<double>(pairs);
    if (mean <= 0.0) {
        throw std::invalid_argument("estimate_bandwidth: all vectors identical (mean distance 0)");
    }
    return convention == BandwidthConvention::InverseMeanDistance ? 1.0 / mean : mean;
}

KernelGram gram_raw(const KernelSpec& spec, const std::vector<BowVector>& features) {
    const int n = static_cast<int>(features.size());
    KernelGram gram(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        for (std::size_t j = i; j < static_cast<std::size_t>(n); ++j) {
            double v = kernel_eval(spec, features[i].values, features[j].values);
            gram.values[i * n + j] = v;
            gram.values[j * n + i] = v;
        }
    });
    return gram;
}

double hilbert_constant(const KernelGram& gram) {
    if (gram.n < 1) throw std::invalid_argument("hilbert_constant: empty Gram");
    double diag = 0.0;
    double all = 0.0;
    for (int i = 0; i < gram.n; ++i) {
        diag += gram.at(i, i);
        for (int j = 0; j < gram.n; ++j) all += gram.at(i, j);
    }
    double n = static_cast<double>(gram.n);
    return diag / n - all / (n * n);
}

std::pair<double, KernelGram> hilbert_normalize(const KernelGram& gram) {
    double c = hilbert_constant(gram);
    if (c <= 1e-12) {
        throw std::invalid_argument("hilbert_normalize: degenerate kernel (c <= 1e-12)");
    }
    KernelGram out = gram;
    for (double& v : out.values) v /= c;
    return {c, out};
}

KernelGram gram_build(const std::vector<KernelSpec>& specs,
                      const std::vector<std::vector<BowVector>>& features_per_spec) {
    if (specs.empty()) throw std::invalid_argument("gram_build: no kernel specs");
    if (specs.size() != features_per_spec.size()) {
        throw std::invalid_argument("gram_build: specs and feature sets differ in count");
    }
    const int n = static_cast<int>(features_per_spec[0].size());
    KernelGram combined(n);
    for (std::size_t u = 0; u < specs.size(); ++u) {
        const KernelSpec& spec = specs[u];
        if (!spec.calibrated()) {
            throw std::invalid_argument("gram_build: uncalibrated kernel spec (c not set)");
        }
        if (static_cast<int>(features_per_spec[u].size()) != n) {
            throw std::invalid_argument("gram_build: feature sets differ in sample count");
        }
        KernelGram raw = gram_raw(spec, features_per_spec[u]);
        double scale = spec.beta / spec.c;
        for (std::size_t i = 0; i < raw.values.size(); ++i) {
            combined.values[i] += scale * raw.values[i];
        }
    }
    return combined;
}

std::vector<double> kernel_row(const std::vector<KernelSpec>& specs,
                               const std::vector<std::vector<BowVector>>& train_features_per_spec,
                               const MultiBow& x) {
    if (specs.size() != train_features_per_spec.size() || specs.size() != x.size()) {
        throw std::invalid_argument("kernel_row: spec/feature bundle mismatch");
    }
    const std::size_t n = train_features_per_spec.empty() ? 0 : train_features_per_spec[0].size();
    std::vector<double> row(n, 0.0);
    for (std::size_t u = 0; u < specs.size(); ++u) {
        if (!specs[u].calibrated()) {
            throw std::invalid_argument("kernel_row: uncalibrated kernel spec");
        }
        double scale = specs[u].beta / specs[u].c;
        for (std::size_t i = 0; i < n; ++i) {
            row[i] += scale * kernel_eval(specs[u], train_features_per_spec[u][i].values,
                                          x[u].values);
        }
    }
    return row;
}

double kernel_value(const std::vector<KernelSpec>& specs, const MultiBow& a, const MultiBow& b) {
    if (specs.size() != a.size() || specs.size() != b.size()) {
        throw std::invalid_argument("kernel_value: spec/feature bundle mismatch");
    }
    double s = 0.0;
    for (std::size_t u = 0; u < specs.size(); ++u) {
        if (!specs[u].calibrated()) {
            throw std::invalid_argument("kernel_value: uncalibrated kernel spec");
        }
        s += specs[u].beta / specs[u].c * kernel_eval(specs[u], a[u].values, b[u].values);
    }
    return s;
}

} // namespace relmap
