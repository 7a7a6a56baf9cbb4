#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace icenav {

/// Seeded generator with fixed-algorithm draws so that every sampled value
/// depends only on (seed, call sequence), not on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Multiplicative bounding; bias is negligible for n << 2^64.
        const unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (always consumes two draws).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double lognormal(double log_median, double sigma_log) {
        return std::exp(log_median + sigma_log * normal());
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace icenav
