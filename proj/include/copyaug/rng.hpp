// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"

#include <cstdint>
#include <limits>

namespace copyaug {

namespace detail {

// SplitMix64 output finalizer.
constexpr std::uint64_t finalize64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

struct Wide {
  std::uint64_t high;
  std::uint64_t low;
};

// Full 64x64 -> 128-bit product.
constexpr Wide mul_wide(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t a_lo = a & 0xffffffffULL, a_hi = a >> 32;
  const std::uint64_t b_lo = b & 0xffffffffULL, b_hi = b >> 32;
  const std::uint64_t lo_lo = a_lo * b_lo;
  const std::uint64_t hi_lo = a_hi * b_lo;
  const std::uint64_t lo_hi = a_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xffffffffULL) + lo_hi;
  return {a_hi * b_hi + (hi_lo >> 32) + (cross >> 32), (cross << 32) | (lo_lo & 0xffffffffULL)};
}

} // namespace detail

/**
 * Counter-based random stream.
 *
 * Every value is a pure function of (seed, epoch, image_index, draw_counter):
 * the first three are hashed into a stream key, and draw `n` is the SplitMix64
 * output for `key + (n + 1) * golden`. Two workers holding streams for
 * different images never share state, so results do not depend on which
 * thread runs what, or in which order.
 *
 * Also models UniformRandomBitGenerator, but the helpers below are what the
 * library uses; std distributions are implementation-defined and would make
 * output depend on the standard library.
 */
class RngStream {
public:
  using result_type = std::uint64_t;

  /// Image index reserved for per-epoch streams that are not tied to one image.
  static constexpr std::uint64_t kEpochStream = std::numeric_limits<std::uint64_t>::max();

  constexpr RngStream(std::uint64_t seed, std::uint64_t epoch, std::uint64_t image_index) noexcept
      : seed_(seed), epoch_(epoch), image_index_(image_index),
        key_(make_key(seed, epoch, image_index)) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t epoch() const noexcept { return epoch_; }
  constexpr std::uint64_t image_index() const noexcept { return image_index_; }
  constexpr std::uint64_t draw_counter() const noexcept { return counter_; }

  constexpr std::uint64_t next() noexcept {
    ++counter_;
    return detail::finalize64(key_ + counter_ * detail::kGolden);
  }

  constexpr result_type operator()() noexcept { return next(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Uniform integer in [0, bound). Lemire's multiply-and-reject, so unbiased.
  std::uint64_t below(std::uint64_t bound) {
    detail::require(bound > 0, "RngStream::below: bound must be positive");
    detail::Wide m = detail::mul_wide(next(), bound);
    if (m.low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (m.low < threshold)
        m = detail::mul_wide(next(), bound);
    }
    return m.high;
  }

  /// Uniform integer in the closed range [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    detail::require(lo <= hi, "RngStream::between: empty range");
    if (hi - lo == max())
      return next();
    return lo + below(hi - lo + 1);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * unit(); }

  bool bernoulli(double p) noexcept { return unit() < p; }

private:
  static constexpr std::uint64_t make_key(std::uint64_t seed, std::uint64_t epoch,
                                          std::uint64_t image_index) noexcept {
    std::uint64_t h = detail::finalize64(seed + detail::kGolden);
    h = detail::finalize64(h ^ (epoch + 2 * detail::kGolden));
    h = detail::finalize64(h ^ (image_index + 3 * detail::kGolden));
    return h;
  }

  std::uint64_t seed_;
  std::uint64_t epoch_;
  std::uint64_t image_index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace copyaug
