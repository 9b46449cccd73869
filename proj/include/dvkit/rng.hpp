#pragma once

#include <cstdint>

namespace dvkit {

/// SplitMix64 (Steele, Lea & Flood), the portable generator used for every
/// seeded draw in the toolkit. Output is identical on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi]. Returns lo when lo == hi.
  constexpr double uniform(double lo, double hi) noexcept {
    const double x = lo + (hi - lo) * uniform();
    return x > hi ? hi : x;
  }

  /// Unbiased integer in [0, n) by rejection; n must be > 0.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  /// Finalizer of SplitMix64 (variant 13 of Stafford's mixers).
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent substream for `index` under `seed`:
  /// state = mix(seed ^ mix(index + golden)). Used to make batch b of a
  /// sample stream reproducible without generating batches 0..b-1.
  static constexpr SplitMix64 substream(std::uint64_t seed,
                                        std::uint64_t index) noexcept {
    return SplitMix64(mix(seed ^ mix(index + kGolden)));
  }

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

 private:
  std::uint64_t state_;
};

}  // namespace dvkit
