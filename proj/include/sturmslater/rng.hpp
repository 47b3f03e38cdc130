#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sturmslater {

/// Counter-based 64-bit generator (splitmix64). The state advances by a fixed
/// Weyl increment and each output is a finalized hash of the state, so the
/// k-th draw from a given seed is a pure function of (seed, k). Reports driven
/// by a fixed seed are therefore byte-identical across runs and platforms,
/// and the recipe is small enough to replicate in any language (see README).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double uniform01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [lo, hi] inclusive (plain modulo; the bias is
    /// negligible at desk scale and keeps the recipe trivially portable).
    long uniform_int(long lo, long hi) noexcept {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(next_u64() % span);
    }

    /// Standard normal via Box-Muller (cosine branch; consumes two uniforms,
    /// no cached partner, so the draw sequence stays counter-addressable).
    double normal() noexcept {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform draw from the unit sphere in R^n.
    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& x : v) {
                x = normal();
                norm2 += x * x;
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

private:
    std::uint64_t state_;
};

}  // namespace sturmslater
