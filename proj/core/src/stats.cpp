#include "relmap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace relmap {

TestResult hoeffding_pvalue(double bac, std::size_t n, double q) {
    if (n < 1) throw std::invalid_argument("hoeffding_pvalue: n must be >= 1");
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("hoeffding_pvalue: q must be in (0,1)");
    double excess = std::max(bac - 0.5, 0.0);
    double exponent = -excess * excess * 8.0 * q * (1.0 - q) * static_cast<double>(n);
    TestResult r;
    r.statistic = bac;
    r.p = std::exp(exponent);
    r.log10_p = exponent / std::numbers::ln10;
    r.n_eff = 4.0 * q * (1.0 - q) * static_cast<double>(n);
    return r;
}

BhResult benjamini_hochberg(const std::vector<double>& pvalues, double alpha) {
    const std::size_t K = pvalues.size();
    if (K < 1) throw std::invalid_argument("benjamini_hochberg: no p-values");
    if (alpha <= 0.0 || alpha >= 1.0) {
        throw std::invalid_argument("benjamini_hochberg: alpha must be in (0,1)");
    }
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pvalues[a] != pvalues[b]) return pvalues[a] < pvalues[b];
        return a < b;
    });

    BhResult out;
    out.thresholds.resize(K);
    std::size_t largest_ok = 0; // 1-based rank; 0 = none
    std::size_t first_violation_rank = 0;
    bool violated = false;
    for (std::size_t k = 1; k <= K; ++k) {
        double thr = alpha * static_cast<double>(k) / static_cast<double>(K);
        out.thresholds[k - 1] = thr;
        bool ok = pvalues[order[k - 1]] <= thr;
        if (ok) largest_ok = k;
        if (!ok && !violated) {
            violated = true;
            first_violation_rank = k - 1;
        }
    }
    if (!violated) first_violation_rank = K;

    for (std::size_t k = 0; k < largest_ok; ++k) out.step_up.push_back(order[k]);
    for (std::size_t k = 0; k < first_violation_rank; ++k) out.first_violation.push_back(order[k]);
    return out;
}

double monte_carlo_fdr(const std::vector<double>& true_bacs,
                       const std::vector<double>& permuted_bacs, double t) {
    if (true_bacs.empty() || permuted_bacs.empty()) {
        throw std::invalid_argument("monte_carlo_fdr: empty input");
    }
    auto tail = [t](const std::vector<double>& v) {
        std::size_t count = 0;
        for (double x : v) {
            if (x >= t) ++count;
        }
        return static_cast<double>(count) / static_cast<double>(v.size());
    };
    double true_tail = tail(true_bacs);
    if (true_tail <= 0.0) {
        throw std::invalid_argument("monte_carlo_fdr: no discoveries at threshold");
    }
    return std::min(1.0, tail(permuted_bacs) / true_tail);
}

std::vector<double> permute_labels(const std::vector<double>& values, std::uint64_t seed) {
    if (values.empty()) throw std::invalid_argument("permute_labels: empty input");
    std::vector<double> out = values;
    Rng rng(seed);
    rng.shuffle(out);
    return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based average rank
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        throw std::invalid_argument("correlation undefined for constant input");
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("spearman: need two equal-length vectors of size >= 2");
    }
    return pearson(average_ranks(a), average_ranks(b));
}

SpearmanPermutation spearman_permutation(const std::vector<int>& indicator,
                                         const std::vector<double>& scores, int n_perm,
                                         int bins, std::uint64_t seed) {
    const std::size_t n = indicator.size();
    if (n != scores.size()) throw std::invalid_argument("spearman_permutation: size mismatch");
    bool has0 = false, has1 = false;
    for (int v : indicator) (v ? has1 : has0) = true;
    if (!has0 || !has1) {
        throw std::invalid_argument("spearman_permutation: indicator must take both values");
    }
    if (n_perm < 1) throw std::invalid_argument("spearman_permutation: n_perm must be >= 1");
    if (bins < 2) throw std::invalid_argument("spearman_permutation: need at least 2 bins");
    if (static_cast<std::size_t>(bins) > n) {
        throw std::invalid_argument("spearman_permutation: more bins than samples");
    }

    std::vector<double> ind(n);
    for (std::size_t i = 0; i < n; ++i) ind[i] = indicator[i];

    SpearmanPermutation out;
    out.bins = bins;
    out.r = spearman(ind, scores); // throws on constant scores

    // Equal-count bins in score order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });
    std::vector<double> bin_ind(bins, 0.0), bin_score(bins, 0.0);
    std::vector<std::size_t> bin_count(bins, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t b = i * static_cast<std::size_t>(bins) / n;
        bin_ind[b] += ind[order[i]];
        bin_score[b] += scores[order[i]];
        ++bin_count[b];
    }
    for (int b = 0; b < bins; ++b) {
        bin_ind[b] /= bin_count[b];
        bin_score[b] /= bin_count[b];
    }
    try {
        out.r_binned = spearman(bin_ind, bin_score);
    } catch (const std::invalid_argument&) {
        out.r_binned = 0.0; // all bins share the indicator mean
    }

    Rng root(seed);
    int at_least = 0;
    std::vector<double> perm = scores;
    out.permuted_r.reserve(n_perm);
    for (int p = 0; p < n_perm; ++p) {
        Rng rng = root.substream("perm", static_cast<std::uint64_t>(p));
        perm = scores;
        rng.shuffle(perm);
        out.permuted_r.push_back(spearman(ind, perm));
        if (out.permuted_r.back() >= out.r) ++at_least;
    }
    out.p = static_cast<double>(1 + at_least) / static_cast<double>(n_perm + 1);
    return out;
}

TestResult chi2_sf_1df(double statistic) {
    if (statistic < 0.0) throw std::invalid_argument("chi2_sf_1df: statistic must be >= 0");
    TestResult r;
    r.statistic = statistic;
    const double z = std::sqrt(statistic / 2.0);
    double p = std::erfc(z);
    if (p > 0.0) {
        r.p = p;
        r.log10_p = std::log10(p);
        return r;
    }
    // Asymptotic tail: erfc(z) ~ exp(-z^2) / (z sqrt(pi)) (1 - 1/(2z^2) + 3/(4z^4)).
    double correction = 1.0 - 0.5 / (z * z) + 0.75 / (z * z * z * z);
    double ln_p = -z * z - std::log(z) - 0.5 * std::log(std::numbers::pi) + std::log(correction);
    r.p = 0.0;
    r.log10_p = ln_p / std::numbers::ln10;
    return r;
}

} // namespace relmap
