#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bento {

/// Deterministic 64-bit generator (splitmix64 stream). Unlike the std
/// distributions, the sampling helpers below are fully specified, so a given
/// (seed, call sequence) produces identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, n) via rejection.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_;
};

/// Stable 64-bit FNV-1a, used only for labeled seed derivation.
std::uint64_t fnv1a64(std::string_view s);

/// Derives an independent labeled substream from a root seed. All pipeline
/// randomness flows through this so artifacts are reproducible from the
/// config's single seed.
Rng derive_rng(std::uint64_t root_seed, std::string_view label, std::uint64_t index = 0);

}  // namespace bento
