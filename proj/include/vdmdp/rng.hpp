#pragma once

#include <cstdint>

namespace vdmdp {

/// SplitMix64 (Steele, Lea, Vigna). Chosen as the project-wide generator because it
/// is tiny, fast, and produces the same stream on every platform for a given seed,
/// which keeps simulation verdicts reproducible across toolchains.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) using the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Modulo bias is irrelevant at the n we use (n << 2^64), and avoiding it
        // would cost portability of the stream.
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

/// Stateless mix of a single 64-bit value; used to derive per-replication seeds
/// (replication i runs on seed ^ mix64(i)).
inline std::uint64_t mix64(std::uint64_t x) {
    return SplitMix64(x).next_u64();
}

} // namespace vdmdp
