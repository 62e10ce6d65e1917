#pragma once

#include <cstdint>
#include <limits>

namespace swarmtopo {

/// Counter-based 64-bit generator.
///
/// Output k of stream (seed, stream) is splitmix64_finalize(key + (k + 1) * phi)
/// with key = splitmix64_finalize(seed ^ (stream * 0xD1B54A32D192ED03)) and
/// phi = 0x9E3779B97F4A7C15. Only integer arithmetic modulo 2^64 is involved,
/// so a given (seed, stream) yields the same sequence on every platform.
/// Doubles use the top 53 bits; bounded integers use rejection, never modulo.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(finalize(seed ^ (stream * 0xD1B54A32D192ED03ULL))) {}

  static constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept { return finalize(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1).
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - (max() % bound + 1) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x <= limit) return x % bound;
    }
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace swarmtopo
