#pragma once

// Explicitly seeded, platform-independent random streams.
//
// Stream splitting rule: every consumer derives its own 64-bit seed with
// stream_seed(root, domain, index), which chains SplitMix64 finalizers over
// (root ^ domain) and index. Trial k of run_trials uses
// derive_trial_seed(seed_base, k) = stream_seed(seed_base, kTrialDomain, k).
// None of the draws below go through <random> distributions, whose output
// is implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nr {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t kMismatchDomain = 0x6D69736D61746368ull; // "mismatch"
inline constexpr std::uint64_t kConnectDomain = 0x636F6E6E65637473ull;  // "connects"
inline constexpr std::uint64_t kNoiseDomain = 0x6E6F697365000000ull;    // "noise"
inline constexpr std::uint64_t kTrialDomain = 0x747269616C000000ull;    // "trial"

constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t domain, std::uint64_t index) {
    return splitmix64(splitmix64(root ^ domain) + index);
}

constexpr std::uint64_t derive_trial_seed(std::uint64_t seed_base, std::uint64_t k) {
    return stream_seed(seed_base, kTrialDomain, k);
}

// xoshiro256** seeded through SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        for (auto& s : s_) {
            seed += 0x9E3779B97F4A7C15ull;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n); n > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        while (true) {
            const unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
            const auto lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Poisson count with mean lambda by sequential inversion; intended for
    // the small per-step means of background noise.
    unsigned poisson(double lambda) {
        if (!(lambda > 0)) return 0;
        const double u = uniform();
        double p = std::exp(-lambda);
        double cdf = p;
        unsigned k = 0;
        while (u >= cdf && k < 1000) {
            ++k;
            p *= lambda / k;
            cdf += p;
        }
        return k;
    }

    bool operator==(const Rng&) const = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
};

} // namespace nr
