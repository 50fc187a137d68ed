#pragma once

#include <cmath>
#include <cstdint>

#include "dimersim/constants.hpp"

namespace dimersim::rng {

// SplitMix64; the per-sample streams are derived by hashing (master_seed,
// sample index), so a sample's draws do not depend on scheduling or thread
// count.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1): never returns 0 or 1, safe under log().
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 h(master_seed ^ (0x94d049bb133111ebULL * (index + 1)));
    h.next();
    return h.next();
}

// One Box-Muller pair of standard normals.
inline void normal_pair(SplitMix64& g, double& z0, double& z1) {
    const double u1 = g.uniform();
    const double u2 = g.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * constants::pi * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

} // namespace dimersim::rng
