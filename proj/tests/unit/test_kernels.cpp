#include "relmap/kernels.hpp"
#include "relmap/rng.hpp"

#include <doctest.h>

#include <cmath>

namespace {

relmap::BowVector bow(std::vector<double> v) {
    relmap::BowVector b;
    b.values = std::move(v);
    return b;
}

std::vector<relmap::BowVector> random_bows(std::size_t n, std::size_t dim, std::uint64_t seed) {
    relmap::Rng rng(seed);
    std::vector<relmap::BowVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(dim);
        double s = 0;
        for (double& x : v) {
            x = rng.uniform();
            s += x;
        }
        for (double& x : v) x /= s;
        out.push_back(bow(v));
    }
    return out;
}

} // namespace

TEST_CASE("hik evaluation") {
    auto x = bow({0.2, 0.8});
    auto z = bow({0.5, 0.5});
    CHECK(relmap::hik_eval(x.values, z.values) == doctest::Approx(0.7));
    CHECK(relmap::hik_eval(x.values, x.values) == doctest::Approx(1.0));
    auto zero = bow({0.0, 0.0});
    CHECK(relmap::hik_eval(x.values, zero.values) == doctest::Approx(0.0));

    // K(x,z) <= min(|x|_1, |z|_1).
    auto a = bow({0.1, 0.3, 0.2});
    auto b = bow({0.4, 0.1, 0.05});
    CHECK(relmap::hik_eval(a.values, b.values) <= std::min(0.6, 0.55) + 1e-12);
}

TEST_CASE("chi2 evaluation") {
    auto x = bow({1.0, 0.0});
    auto z = bow({0.0, 1.0});
    CHECK(relmap::chi2_eval(x.values, z.values, 1.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(relmap::chi2_eval(x.values, x.values, 2.3) == doctest::Approx(1.0));

    // Zero-sum dimensions are skipped.
    auto a = bow({0.5, 0.0, 0.5});
    auto b = bow({0.25, 0.0, 0.75});
    double d = relmap::chi2_distance(a.values, b.values);
    CHECK(d == doctest::Approx(0.25 * 0.25 / 0.75 + 0.25 * 0.25 / 1.25));

    // Values in (0,1] on random normalized inputs.
    auto bows = random_bows(8, 5, 3);
    for (std::size_t i = 0; i < bows.size(); ++i) {
        for (std::size_t j = 0; j < bows.size(); ++j) {
            double k = relmap::chi2_eval(bows[i].values, bows[j].values, 0.7);
            CHECK(k > 0.0);
            CHECK(k <= 1.0);
        }
    }
}

TEST_CASE("bandwidth estimation") {
    auto a = bow({1.0, 0.0});
    auto c = bow({0.0, 1.0});
    // Pairs: (a,a)=0, (a,c)=2, (a,c)=2 -> mean 4/3.
    std::vector<relmap::BowVector> sample = {a, a, c};
    double sigma = relmap::estimate_bandwidth(sample);
    CHECK(sigma == doctest::Approx(1.0 / (4.0 / 3.0)));
    CHECK(relmap::estimate_bandwidth(sample, relmap::BandwidthConvention::MeanDistance) ==
          doctest::Approx(4.0 / 3.0));

    std::vector<relmap::BowVector> same = {a, a, a};
    CHECK_THROWS_AS(relmap::estimate_bandwidth(same), std::invalid_argument);
}

TEST_CASE("hilbert normalization") {
    relmap::KernelGram eye(2);
    eye.at(0, 0) = 1.0;
    eye.at(1, 1) = 1.0;
    auto [c, normalized] = relmap::hilbert_normalize(eye);
    CHECK(c == doctest::Approx(0.5));
    CHECK(normalized.at(0, 0) == doctest::Approx(2.0));
    CHECK(normalized.at(0, 1) == doctest::Approx(0.0));

    // Idempotence: c of an already-normalized Gram is 1.
    CHECK(relmap::hilbert_constant(normalized) == doctest::Approx(1.0).epsilon(1e-9));

    relmap::KernelGram constant(3);
    for (double& v : constant.values) v = 0.7;
    CHECK_THROWS_AS(relmap::hilbert_normalize(constant), std::invalid_argument);

    // Random HIK grams stay symmetric and idempotent under normalization.
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto bows = random_bows(7, 6, seed);
        relmap::KernelSpec spec;
        spec.kind = relmap::KernelKind::Hik;
        auto gram = relmap::gram_raw(spec, bows);
        for (int i = 0; i < gram.n; ++i) {
            for (int j = 0; j < gram.n; ++j) {
                CHECK(gram.at(i, j) == doctest::Approx(gram.at(j, i)).epsilon(1e-12));
            }
        }
        auto [cc, norm] = relmap::hilbert_normalize(gram);
        CHECK(cc > 0.0);
        CHECK(relmap::hilbert_constant(norm) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("combined gram assembly") {
    auto bows = random_bows(6, 4, 9);
    relmap::KernelSpec spec;
    spec.kind = relmap::KernelKind::Hik;
    auto raw = relmap::gram_raw(spec, bows);
    auto [c, normalized] = relmap::hilbert_normalize(raw);

    relmap::KernelSpec calibrated = spec;
    calibrated.c = c;
    auto combined = relmap::gram_build({calibrated}, {bows});
    for (std::size_t i = 0; i < combined.values.size(); ++i) {
        CHECK(combined.values[i] == doctest::Approx(normalized.values[i]));
    }

    auto doubled = relmap::gram_build({calibrated, calibrated}, {bows, bows});
    for (std::size_t i = 0; i < doubled.values.size(); ++i) {
        CHECK(doubled.values[i] == doctest::Approx(2.0 * normalized.values[i]));
    }

    relmap::KernelSpec uncal;
    uncal.kind = relmap::KernelKind::Hik;
    CHECK_THROWS_AS(relmap::gram_build({uncal}, {bows}), std::invalid_argument);

    // kernel_row against a training sample reproduces the Gram column.
    auto row = relmap::kernel_row({calibrated}, {bows}, {bows[2]});
    for (int i = 0; i < combined.n; ++i) {
        CHECK(row[i] == doctest::Approx(combined.at(i, 2)));
    }
}
