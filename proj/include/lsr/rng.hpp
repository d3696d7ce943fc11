#pragma once

#include <cstdint>

namespace lsr {

/// SplitMix64 generator (Steele, Lea, Flood 2014). Used everywhere a seeded,
/// platform-stable stream is needed: parameter generation, token states,
/// synthetic corpora, test fixtures.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-1, 1).
    double next_pm1() { return 2.0 * next_unit() - 1.0; }

    /// Uniform integer in [lo, hi] (inclusive). Modulo bias is irrelevant at
    /// the range sizes used here.
    std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }

  private:
    std::uint64_t state_;
};

/// 64-bit FNV-1a. Stable across platforms; used for token hashing.
inline std::uint64_t fnv1a64(const char* data, std::size_t len) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace lsr
