#pragma once

#include <cstdint>
#include <limits>

namespace plankforge {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream key: the generator for sample `index` under `seed` is a
/// pure function of the pair, so parallel evaluation order never matters.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

/// SplitMix64 as a UniformRandomBitGenerator, for use with <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  constexpr SplitMix64(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(stream_key(seed, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Standard normal deviate via Box-Muller. Written out rather than using
/// std::normal_distribution so that streams are identical across standard
/// library implementations.
double standard_normal(SplitMix64& gen) noexcept;

}  // namespace plankforge
