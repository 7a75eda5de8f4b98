#pragma once

#include <cmath>
#include <cstdint>

#include "types.hpp"

// Counter-based deterministic random numbers. Every draw is a pure function of
// (seed, stream, counters), so sweeps can be simulated in any order or in
// parallel and still produce bit-identical results.

namespace ofdr::rng {

enum Stream : uint64_t {
    kAseX = 1,
    kAseY = 2,
    kLaserAnchor = 3,
    kLaserBridge = 4,
    kEvent = 5,
    kGeneric = 6,
};

inline uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t key(uint64_t seed, uint64_t stream, uint64_t a = 0, uint64_t b = 0,
                    uint64_t c = 0) {
    uint64_t h = splitmix(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix(h ^ stream);
    h = splitmix(h ^ a);
    h = splitmix(h ^ b);
    h = splitmix(h ^ c);
    return h;
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(uint64_t k) { return static_cast<double>(k >> 11) * 0x1.0p-53; }

// One standard normal per key (Box-Muller cosine branch from two derived uniforms).
inline double gaussian(uint64_t k) {
    const double u1 = uniform01(splitmix(k ^ 0x243f6a8885a308d3ULL));
    const double u2 = uniform01(splitmix(k ^ 0x13198a2e03707344ULL));
    const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-60));
    return r * std::cos(kTwoPi * u2);
}

// Pair of independent standard normals per key (both Box-Muller branches).
inline std::pair<double, double> gaussian_pair(uint64_t k) {
    const double u1 = uniform01(splitmix(k ^ 0x243f6a8885a308d3ULL));
    const double u2 = uniform01(splitmix(k ^ 0x13198a2e03707344ULL));
    const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-60));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

}  // namespace ofdr::rng
