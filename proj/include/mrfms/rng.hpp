#pragma once

// Deterministic random variates with explicitly pinned recipes, so results are
// reproducible per seed and reimplementable from the description alone:
//   engine      mt19937_64
//   uniform01   (x >> 11) * 2^-53, in [0, 1)
//   uniform int rejection sampling on 64-bit words (no modulo bias)
//   normal      Box-Muller on two uniform01 draws, spare value cached
// Seed streams are split with splitmix64 so independent consumers (instance
// generation, per-restart samplers, per-scale sampling) never share a stream.

#include <cmath>
#include <cstdint>
#include <random>

#include "mrfms/core.hpp"

namespace mrfms {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent seed for stream `stream` of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + splitmix64(stream));
}

class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    real uniform01() { return static_cast<real>(next_u64() >> 11) * 0x1.0p-53; }

    real uniform(real lo, real hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), n >= 1.
    int uniform_int(int n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    /// Standard normal via Box-Muller.
    real normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        real u1 = 1.0 - uniform01(); // in (0, 1]
        real u2 = uniform01();
        real radius = std::sqrt(-2.0 * std::log(u1));
        real angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    real spare_ = 0.0;
};

} // namespace mrfms
