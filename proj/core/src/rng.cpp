#include "relmap/rng.hpp"

#include <cmath>
#include <numbers>

namespace relmap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Reject the tail of the 2^64 range that does not divide evenly.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x > limit);
    return x % n;
}

double Rng::normal() {
    // Box-Muller; u1 in (0,1] to keep the log finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::substream(std::string_view label, std::uint64_t index) const {
    return Rng(derive_seed(seed_, label, index));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    for (unsigned char c : label) {
        h = splitmix64(h ^ c);
    }
    return splitmix64(h ^ index);
}

} // namespace relmap
