#pragma once

#include <cstdint>

namespace winoreg {

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
/// needed so results are identical across platforms and standard-library
/// versions; std::mt19937 distributions are not portable across vendors.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n); n must be nonzero. The tiny modulo bias is
    /// irrelevant here and keeps the mapping trivially portable.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Independent child stream: same seed + different index gives streams
    /// that never need coordination (per-tree, per-layer, ...).
    SplitMix64 fork(std::uint64_t index) const {
        SplitMix64 probe(state_ ^ (0xD1B54A32D192ED03ULL * (index + 1)));
        return SplitMix64(probe.next());
    }

  private:
    std::uint64_t state_;
};

} // namespace winoreg
