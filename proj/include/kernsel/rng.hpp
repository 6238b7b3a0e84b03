#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kernsel {

using Rng = std::mt19937_64;

// splitmix64 mix of (master, index); gives statistically independent streams
// for replicate/worker seeding while staying reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0, 1) built directly from the engine's bits so the stream does
// not depend on the standard library's distribution implementations.
inline double runif(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes exactly two uniforms per draw.
inline double rnorm(Rng& rng) {
    double u1 = 1.0 - runif(rng); // (0, 1]
    double u2 = runif(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace kernsel
