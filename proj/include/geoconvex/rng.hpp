#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace geoconvex {

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based hash: every random word is a pure function of
/// (seed, stream, index, lane), so any language reproducing
///
///   splitmix64(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index) + lane)
///
/// draws the same sample stream regardless of evaluation order.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t index,
                                     std::uint64_t lane) noexcept {
  return splitmix64(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index) +
                    lane);
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential view over one (seed, stream, index) counter block.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : seed_(seed), stream_(stream), index_(index) {}

  std::uint64_t next_bits() noexcept {
    return counter_hash(seed_, stream_, index_, lane_++);
  }

  double uniform() noexcept { return to_unit(next_bits()); }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Standard normal via Box-Muller (one draw per call, two lanes consumed).
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t lane() const noexcept { return lane_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_;
  std::uint64_t lane_ = 0;
};

}  // namespace geoconvex
