#include "relmap/cross_validation.hpp"
#include "relmap/svm.hpp"

#include "../support/qp_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

namespace {

relmap::KernelGram random_psd_gram(std::size_t n, std::size_t feat_dim, relmap::Rng& rng) {
    // Gram of random feature vectors plus a small ridge: PSD by construction.
    std::vector<std::vector<double>> feats(n, std::vector<double>(feat_dim));
    for (auto& f : feats) {
        for (double& v : f) v = rng.normal();
    }
    relmap::KernelGram gram(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t d = 0; d < feat_dim; ++d) s += feats[i][d] * feats[j][d];
            gram.at(i, j) = s + (i == j ? 1e-3 : 0.0);
        }
    }
    return gram;
}

} // namespace

TEST_CASE("threshold labels") {
    std::vector<double> values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(relmap::quantile_threshold(values, 0.5) == doctest::Approx(5.5));
    auto labels = relmap::threshold_labels(values, 0.5);
    for (int i = 0; i < 5; ++i) CHECK(labels[i] == -1);
    for (int i = 5; i < 10; ++i) CHECK(labels[i] == +1);

    CHECK_THROWS_AS(relmap::threshold_labels({3, 3, 3, 3}, 0.5), std::invalid_argument);
}

TEST_CASE("smo: two-point separable problem") {
    relmap::KernelGram gram(2);
    gram.at(0, 0) = 1.0;
    gram.at(1, 1) = 1.0;
    auto model = relmap::smo_train(gram, {+1, -1}, 10.0, {1e-6, 1000});
    // Closed form: alpha = 2 / (K11 - 2 K12 + K22) = 1 for both.
    CHECK(model.alpha[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(model.alpha[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(model.alpha[0] * 1 + model.alpha[1] * -1 == doctest::Approx(0.0).epsilon(1e-8));

    // Both are support vectors and f separates them.
    std::vector<double> row0 = {gram.at(0, 0), gram.at(0, 1)};
    std::vector<double> row1 = {gram.at(1, 0), gram.at(1, 1)};
    CHECK(relmap::decision_value(model, row0) > 0.0);
    CHECK(relmap::decision_value(model, row1) < 0.0);
}

TEST_CASE("smo: single-class labels throw") {
    relmap::KernelGram gram(2);
    gram.at(0, 0) = gram.at(1, 1) = 1.0;
    CHECK_THROWS_AS(relmap::smo_train(gram, {+1, +1}, 1.0), std::invalid_argument);
}

TEST_CASE("smo: duplicating every sample keeps the decision function") {
    relmap::Rng rng(21);
    const std::size_t n = 5;
    auto gram = random_psd_gram(n, 3, rng);
    std::vector<int> y = {+1, -1, +1, -1, -1};
    auto model = relmap::smo_train(gram, y, 1.0, {1e-6, 200000});

    // Each duplicate pair shares the original sample's box, so the duplicated
    // problem with C/2 is the original problem in the pair sums.
    relmap::KernelGram dup(2 * n);
    std::vector<int> y2(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        y2[i] = y[i % n];
        for (std::size_t j = 0; j < 2 * n; ++j) dup.at(i, j) = gram.at(i % n, j % n);
    }
    auto model2 = relmap::smo_train(dup, y2, 0.5, {1e-6, 400000});

    for (std::size_t t = 0; t < n; ++t) {
        std::vector<double> row(n), row2(2 * n);
        for (std::size_t i = 0; i < n; ++i) row[i] = gram.at(i, t);
        for (std::size_t i = 0; i < 2 * n; ++i) row2[i] = gram.at(i % n, t);
        CHECK(relmap::decision_value(model, row) ==
              doctest::Approx(relmap::decision_value(model2, row2)).epsilon(1e-3));
    }
}

TEST_CASE("smo matches the active-set enumeration oracle on tiny problems") {
    relmap::Rng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(4); // 3..6
        auto gram = random_psd_gram(n, 2 + rng.uniform_index(3), rng);
        std::vector<int> y(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.5 ? -1 : +1;
            (y[i] > 0 ? pos : neg) = true;
        }
        if (!pos) y[0] = +1;
        if (!neg) y[n - 1] = -1;
        double C = 0.5 + rng.uniform() * 2.0;

        auto model = relmap::smo_train(gram, y, C, {1e-8, 2000000});
        auto oracle = relmap::testing::brute_force_svm_dual(gram, y, C);
        REQUIRE(std::isfinite(oracle.objective));
        CHECK(model.dual_objective(gram) == doctest::Approx(oracle.objective).epsilon(1e-6));

        // Constraints: box, equality, and KKT margin for free support vectors.
        double eq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(model.alpha[i] >= -1e-12);
            CHECK(model.alpha[i] <= C + 1e-12);
            eq += model.alpha[i] * y[i];
        }
        CHECK(std::abs(eq) < 1e-8);
        for (std::size_t i = 0; i < n; ++i) {
            if (model.alpha[i] > 1e-6 * C && model.alpha[i] < C * (1 - 1e-6)) {
                std::vector<double> row(n);
                for (std::size_t j = 0; j < n; ++j) row[j] = gram.at(j, i);
                CHECK(y[i] * relmap::decision_value(model, row) == doctest::Approx(1.0).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("decision value basics and label-flip symmetry") {
    relmap::TrainedSvm m;
    m.alpha = {0.0, 0.0};
    m.y = {+1, -1};
    m.b = 0.37;
    CHECK(relmap::decision_value(m, std::vector<double>{1.0, 2.0}) == doctest::Approx(0.37));
    CHECK_THROWS_AS(relmap::decision_value(m, std::vector<double>{1.0}), std::invalid_argument);

    relmap::Rng rng(31);
    auto gram = random_psd_gram(6, 3, rng);
    std::vector<int> y = {+1, +1, -1, -1, +1, -1};
    std::vector<int> y_flip(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y_flip[i] = -y[i];
    auto a = relmap::smo_train(gram, y, 1.0, {1e-8, 200000});
    auto b = relmap::smo_train(gram, y_flip, 1.0, {1e-8, 200000});
    for (int t = 0; t < gram.n; ++t) {
        std::vector<double> row(gram.n);
        for (int i = 0; i < gram.n; ++i) row[i] = gram.at(i, t);
        CHECK(relmap::decision_value(a, row) ==
              doctest::Approx(-relmap::decision_value(b, row)).epsilon(1e-4));
    }
}

TEST_CASE("decision sign invariant under beta rescaling with compensating alpha") {
    relmap::Rng rng(41);
    auto bows = [&](std::size_t n) {
        std::vector<relmap::BowVector> out(n);
        for (auto& b : out) {
            b.values.resize(4);
            double s = 0;
            for (double& v : b.values) {
                v = rng.uniform();
                s += v;
            }
            for (double& v : b.values) v /= s;
        }
        return out;
    };
    auto feats = bows(6);
    relmap::KernelSpec spec;
    spec.kind = relmap::KernelKind::Hik;
    auto [c, g] = relmap::hilbert_normalize(relmap::gram_raw(spec, feats));
    spec.c = c;
    auto gram = relmap::gram_build({spec}, {feats});
    relmap::TrainedSvm model = relmap::smo_train(gram, {+1, -1, +1, -1, +1, -1}, 1.0);
    model.specs = {spec};

    const double lambda = 3.5;
    relmap::TrainedSvm scaled = model;
    scaled.specs[0].beta *= lambda;
    for (double& a : scaled.alpha) a /= lambda;
    // b stays: the sign comparison is on f - b.
    auto x = bows(1);
    double f0 = relmap::decision_value(model, relmap::kernel_row(model.specs, {feats}, {x[0]}));
    double f1 = relmap::decision_value(scaled, relmap::kernel_row(scaled.specs, {feats}, {x[0]}));
    CHECK((f0 - model.b) == doctest::Approx(f1 - scaled.b).epsilon(1e-9));
    CHECK(std::signbit(f0 - model.b) == std::signbit(f1 - scaled.b));
}

TEST_CASE("balanced accuracy") {
    CHECK(relmap::balanced_accuracy({1, 1, -1, -1}, {+1, +1, -1, -1}) == doctest::Approx(1.0));
    CHECK(relmap::balanced_accuracy({0, 0, 0, 0}, {+1, +1, -1, -1}) == doctest::Approx(0.5));
    // n+ = 1 (correct), n- = 3 with 2 correct -> (1 + 2/3)/2 = 5/6.
    CHECK(relmap::balanced_accuracy({1, -1, -1, 1}, {+1, -1, -1, -1}) ==
          doctest::Approx(5.0 / 6.0));
    CHECK_THROWS_AS(relmap::balanced_accuracy({1, 2}, {+1, +1}), std::invalid_argument);

    // Invariance under strictly monotone transforms of the scores.
    std::vector<double> scores = {-2.0, -0.5, 0.3, 1.4};
    std::vector<int> labels = {-1, +1, +1, -1};
    auto transformed = scores;
    for (double& s : transformed) s = std::tanh(2.0 * s) * 3.0;
    CHECK(relmap::balanced_accuracy(scores, labels) ==
          relmap::balanced_accuracy(transformed, labels));
}

TEST_CASE("tail accuracy") {
    std::vector<double> scores = {-2.0, -1.0, 0.5, 1.5};
    std::vector<int> labels = {-1, +1, +1, +1};
    auto t0 = relmap::tail_accuracy(scores, labels, 0.0);
    CHECK(t0.n_neg + t0.n_pos == 4);
    CHECK(t0.n_neg == 2);
    CHECK(t0.acc_neg == doctest::Approx(0.5));
    CHECK(t0.acc_pos == doctest::Approx(1.0));

    auto t1 = relmap::tail_accuracy(scores, labels, 1.2);
    CHECK(t1.n_neg == 1);
    CHECK(t1.n_pos == 1);

    auto far = relmap::tail_accuracy(scores, labels, 10.0);
    CHECK(far.n_neg == 0);
    CHECK(far.n_pos == 0);
}

TEST_CASE("survival labels") {
    std::vector<double> times = {61, 59, 80, 10};
    std::vector<bool> censored = {false, false, true, false};
    auto sl = relmap::survival_labels(times, censored, 60.0);
    REQUIRE(sl.uncensored.size() == 3);
    CHECK(sl.uncensored == std::vector<std::size_t>{0, 1, 3});
    CHECK(sl.labels == std::vector<int>{+1, -1, -1});

    CHECK_THROWS_AS(relmap::survival_labels({5, 6}, {true, true}, 60.0), std::invalid_argument);
}

TEST_CASE("stratified folds partition and keep both classes") {
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(i < 9 ? +1 : -1);
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    relmap::Rng rng(8);
    auto folds = relmap::stratified_folds(labels, idx, 3, rng);
    REQUIRE(folds.size() == 3);
    std::vector<int> seen(labels.size(), 0);
    for (const auto& f : folds) {
        int pos = 0;
        for (std::size_t i : f) {
            ++seen[i];
            if (labels[i] > 0) ++pos;
        }
        CHECK(pos == 3); // 9 positives over 3 folds
    }
    for (int s : seen) CHECK(s == 1);

    relmap::Rng rng2(9);
    CHECK_THROWS_AS(relmap::stratified_folds(labels, idx, 10, rng2), std::invalid_argument);
}

TEST_CASE("nested cv: outer folds disjoint and covering, fixed C") {
    // Separable 1-d toy data via a linear kernel base.
    relmap::Rng rng(15);
    const std::size_t n = 24;
    std::vector<relmap::BowVector> feats(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = i < n / 2 ? rng.uniform(0.0, 0.4) : rng.uniform(0.6, 1.0);
        feats[i].values = {v, 1.0 - v};
        values[i] = v;
    }
    relmap::KernelSpec spec;
    spec.kind = relmap::KernelKind::Hik;
    auto base = relmap::make_kernel_base(spec, feats);

    relmap::CvOptions opts;
    opts.outer_folds = 4;
    opts.fixed_C = 1.0;
    opts.seed = 3;
    auto report = relmap::nested_cv({base}, values, {0.5}, opts);
    REQUIRE(report.per_quantile.size() == 1);
    const auto& q = report.per_quantile[0];
    std::vector<int> seen(n, 0);
    for (const auto& f : q.folds) {
        CHECK(f.chosen_C == 1.0);
        for (std::size_t i : f.test_indices) ++seen[i];
    }
    for (int s : seen) CHECK(s == 1);
    CHECK(q.mean_bac > 0.9); // separable by construction
}

TEST_CASE("model persistence round trip") {
    relmap::TrainedSvm m;
    m.alpha = {0.5, 0.0, 1.0};
    m.y = {+1, -1, -1};
    m.b = -0.25;
    m.C = 2.0;
    relmap::KernelSpec s;
    s.kind = relmap::KernelKind::Chi2;
    s.sigma = 1.7;
    s.beta = 1.0;
    s.c = 0.9;
    m.specs = {s};
    m.sample_ids = {"a", "b", "c"};

    auto path = std::filesystem::temp_directory_path() / "relmap_model_test.rsvm";
    relmap::write_model(path, m);
    auto back = relmap::read_model(path);
    CHECK(back.alpha == m.alpha);
    CHECK(back.y == m.y);
    CHECK(back.b == m.b);
    CHECK(back.C == m.C);
    REQUIRE(back.specs.size() == 1);
    CHECK(back.specs[0].kind == relmap::KernelKind::Chi2);
    CHECK(back.specs[0].sigma == s.sigma);
    CHECK(back.specs[0].c == s.c);
    CHECK(back.sample_ids == m.sample_ids);
    std::filesystem::remove(path);
}
