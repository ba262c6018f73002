#include <benchmark/benchmark.h>

#include "relmap/codebook.hpp"
#include "relmap/descriptors.hpp"
#include "relmap/kernels.hpp"
#include "relmap/rng.hpp"
#include "relmap/svm.hpp"

namespace {

std::vector<relmap::BowVector> random_bows(std::size_t n, std::size_t dim, std::uint64_t seed) {
    relmap::Rng rng(seed);
    std::vector<relmap::BowVector> out(n);
    for (auto& b : out) {
        b.values.resize(dim);
        double s = 0;
        for (double& v : b.values) {
            v = rng.uniform();
            s += v;
        }
        for (double& v : b.values) v /= s;
    }
    return out;
}

void bm_hik_eval(benchmark::State& state) {
    auto bows = random_bows(2, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::hik_eval(bows[0].values, bows[1].values));
    }
}
BENCHMARK(bm_hik_eval)->Arg(510);

void bm_chi2_eval(benchmark::State& state) {
    auto bows = random_bows(2, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::chi2_eval(bows[0].values, bows[1].values, 1.0));
    }
}
BENCHMARK(bm_chi2_eval)->Arg(510);

void bm_gram_raw(benchmark::State& state) {
    auto bows = random_bows(static_cast<std::size_t>(state.range(0)), 510, 3);
    relmap::KernelSpec spec;
    spec.kind = relmap::KernelKind::Hik;
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::gram_raw(spec, bows));
    }
}
BENCHMARK(bm_gram_raw)->Arg(100)->Unit(benchmark::kMillisecond);

void bm_sift_descriptor(benchmark::State& state) {
    relmap::Rng rng(4);
    relmap::Plane plane(64, 64);
    for (float& v : plane.values) v = static_cast<float>(rng.uniform());
    auto field = relmap::sobel_gradients(plane);
    relmap::Keypoint kp = relmap::Keypoint::at(32, 32, 2.0);
    auto ori = relmap::dominant_orientation(field, kp);
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::sift_descriptor(field, kp, ori.angle));
    }
}
BENCHMARK(bm_sift_descriptor);

void bm_rank_soft_map(benchmark::State& state) {
    relmap::Rng rng(5);
    relmap::Vocabulary vocab;
    vocab.dim = 256;
    vocab.k = 510;
    vocab.weights.assign(256, 1.0f);
    vocab.centers.resize(510 * 256);
    for (float& v : vocab.centers) v = static_cast<float>(rng.uniform());
    std::vector<float> query(256);
    for (float& v : query) v = static_cast<float>(rng.uniform());
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::rank_soft_map(query, vocab, 4));
    }
}
BENCHMARK(bm_rank_soft_map);

void bm_smo_train(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto bows = random_bows(n, 64, 6);
    relmap::KernelSpec spec;
    spec.kind = relmap::KernelKind::Hik;
    auto [c, gram] = relmap::hilbert_normalize(relmap::gram_raw(spec, bows));
    relmap::Rng rng(7);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? -1 : +1;
    y[0] = +1;
    y[1] = -1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(relmap::smo_train(gram, y, 1.0));
    }
}
BENCHMARK(bm_smo_train)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
