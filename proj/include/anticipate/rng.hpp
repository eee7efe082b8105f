#pragma once

#include <cstdint>

namespace anticipate {

/// SplitMix64 (Steele, Lea & Flood). Chosen for its one-line state update so
/// fixtures can be replayed bit-for-bit from any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, range) via the high word of a 64x64 multiply.
  std::uint64_t next_below(std::uint64_t range) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * range) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace anticipate
