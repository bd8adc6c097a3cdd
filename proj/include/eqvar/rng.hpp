#pragma once

#include <cmath>
#include <cstdint>

namespace eqvar {

/// SplitMix64 — a counter-based 64-bit generator (Steele, Lea & Flood's
/// mixing function over a Weyl sequence). Output k is a pure hash of
/// (seed, k), so substreams derived by hashing are independent of the
/// order in which they are consumed. All samplers below are implemented
/// from raw bits so that sequences are identical across platforms and
/// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Standard normal via Box-Muller (two uniforms per draw).
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    /// Deterministic substream derivation: hash(seed, index). Substreams
    /// are order-insensitive; deriving the same (seed, index) always
    /// yields the same stream regardless of interleaving.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        return mix(seed ^ mix(index + kGamma));
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace eqvar
