// Portable pseudo-random generation for every randomized component.
//
// Engine: xoshiro256++ (Blackman & Vigna), seeded through two SplitMix64
// avalanche rounds over (seed, stream). All distributions are implemented
// here from first principles so that a given (seed, stream) produces the
// same byte-identical draws on every platform:
//
//   * uniform_double: top 53 bits of the engine output, scaled by 2^-53.
//   * uniform_below(n): Lemire's unbiased multiply-shift rejection method.
//   * normal(): Marsaglia polar method (sqrt/log only, no trig).
//   * shuffle / sample_without_replacement: Fisher-Yates driven by
//     uniform_below.
//
// Never use std::uniform_*_distribution or std::normal_distribution with
// this engine; their output is implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace afl {

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t h = mix(seed);
        h = mix(h ^ stream);
        // Four consecutive SplitMix64 outputs make the xoshiro state.
        for (auto& si : s_) {
            h += 0x9E3779B97F4A7C15ULL;
            si = mix_final(h);
        }
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased (Lemire 2019). n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via the Marsaglia polar method; one spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * uniform_double() - 1.0;
            v = 2.0 * uniform_double() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // +1 or -1 with equal probability.
    int rademacher() { return uniform_double() < 0.5 ? 1 : -1; }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(xs[i - 1], xs[j]);
        }
    }

    // k distinct values from {lo, ..., hi-1} via partial Fisher-Yates,
    // returned sorted ascending.
    std::vector<int> sample_without_replacement(int lo, int hi, int k);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // SplitMix64 step: advance-and-finalize.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        return mix_final(z);
    }

    static std::uint64_t mix_final(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
    bool has_spare_;
    double spare_;
};

// Stream ids used by the harness so that independent random purposes never
// share an engine. Epoch shuffles use kShuffleStreamBase + epoch_index.
inline constexpr std::uint64_t kDataStream = 1;
inline constexpr std::uint64_t kTestStream = 2;
inline constexpr std::uint64_t kInitStream = 3;
inline constexpr std::uint64_t kShuffleStreamBase = 1u << 16;

}  // namespace afl
