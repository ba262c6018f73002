#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace relmap {

/// Seeded random stream with portable sampling transforms.
///
/// All sampling (uniform, normal, shuffles) is implemented on top of the raw
/// mt19937_64 output so that results are bit-identical across standard library
/// versions. Substreams derived from (seed, label, index) give independent,
/// reproducible streams per work item.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be > 0. Rejection sampling, unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Independent stream for work item `index` under a labeled domain.
    Rng substream(std::string_view label, std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Stable 64-bit mixing of (seed, label, index) for substream derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index);

} // namespace relmap
