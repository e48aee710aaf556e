// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_DETAIL_EXACT_MEAN_HPP
#define FDEPTH_DETAIL_EXACT_MEAN_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace fdepth::detail {

/// Fixed-point accumulator wide enough to hold any sum of up to 2^64 finite
/// doubles without rounding. Bit 0 weighs 2^-1074 (the smallest subnormal).
///
/// mean() divides the exact sum by the count and rounds once, to nearest
/// with ties to even. The result is therefore independent of summation
/// order, and a list of identical values x returns exactly x.
class ExactSum {
 public:
  void add(double x) noexcept {
    if (!std::isfinite(x)) {
      non_finite_ = true;
      return;
    }
    ++count_;
    const auto raw = std::bit_cast<std::uint64_t>(x);
    const auto biased = static_cast<unsigned>((raw >> 52) & 0x7ff);
    std::uint64_t mant = raw & ((std::uint64_t{1} << 52) - 1);
    unsigned shift = 0;
    if (biased != 0) {
      mant |= std::uint64_t{1} << 52;
      shift = biased - 1;
    }
    if (mant == 0) return;
    Limbs& acc = (raw >> 63) ? negative_ : positive_;
    add_shifted(acc, mant, shift);
  }

  std::uint64_t count() const noexcept { return count_; }

  /// Correctly rounded arithmetic mean; NaN when empty or when a non-finite
  /// value was added.
  double mean() const noexcept {
    if (count_ == 0 || non_finite_) return std::numeric_limits<double>::quiet_NaN();
    Limbs mag{};
    bool neg = false;
    if (compare(positive_, negative_) >= 0) {
      mag = subtract(positive_, negative_);
    } else {
      mag = subtract(negative_, positive_);
      neg = true;
    }
    const std::uint64_t rem = divide(mag, count_);
    const double v = round_to_double(mag, rem, count_);
    return neg ? -v : v;
  }

 private:
  static constexpr std::size_t kLimbs = 34;
  using Limbs = std::array<std::uint64_t, kLimbs>;

  static void add_at(Limbs& acc, std::size_t idx, std::uint64_t v) noexcept {
    while (v != 0 && idx < kLimbs) {
      const std::uint64_t before = acc[idx];
      acc[idx] = before + v;
      v = acc[idx] < before ? 1 : 0;
      ++idx;
    }
  }

  static void add_shifted(Limbs& acc, std::uint64_t mant, unsigned shift) noexcept {
    const std::size_t idx = shift / 64;
    const unsigned off = shift % 64;
    add_at(acc, idx, mant << off);
    if (off != 0) add_at(acc, idx + 1, mant >> (64 - off));
  }

  static int compare(const Limbs& a, const Limbs& b) noexcept {
    for (std::size_t i = kLimbs; i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }

  // a - b, requires a >= b.
  static Limbs subtract(const Limbs& a, const Limbs& b) noexcept {
    Limbs out{};
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < kLimbs; ++i) {
      const std::uint64_t d = a[i] - b[i];
      const std::uint64_t b1 = a[i] < b[i] ? 1 : 0;
      out[i] = d - borrow;
      const std::uint64_t b2 = d < borrow ? 1 : 0;
      borrow = b1 | b2;
    }
    return out;
  }

  // In-place long division; returns the remainder.
  static std::uint64_t divide(Limbs& value, std::uint64_t divisor) noexcept {
    unsigned __int128 rem = 0;
    for (std::size_t i = kLimbs; i-- > 0;) {
      const unsigned __int128 cur = (rem << 64) | value[i];
      value[i] = static_cast<std::uint64_t>(cur / divisor);
      rem = cur % divisor;
    }
    return static_cast<std::uint64_t>(rem);
  }

  static bool bit(const Limbs& v, std::size_t pos) noexcept {
    return (v[pos / 64] >> (pos % 64)) & 1u;
  }

  static std::uint64_t bits(const Limbs& v, std::size_t pos, unsigned count) noexcept {
    const std::size_t idx = pos / 64;
    const unsigned off = pos % 64;
    std::uint64_t out = v[idx] >> off;
    if (off != 0 && idx + 1 < kLimbs) out |= v[idx + 1] << (64 - off);
    return count >= 64 ? out : out & ((std::uint64_t{1} << count) - 1);
  }

  // True if any bit strictly below `pos` is set.
  static bool any_below(const Limbs& v, std::size_t pos) noexcept {
    const std::size_t idx = pos / 64;
    for (std::size_t i = 0; i < idx; ++i) {
      if (v[i] != 0) return true;
    }
    const unsigned off = pos % 64;
    return off != 0 && (v[idx] & ((std::uint64_t{1} << off) - 1)) != 0;
  }

  static double round_to_double(const Limbs& q, std::uint64_t rem,
                                std::uint64_t divisor) noexcept {
    int top = -1;
    for (std::size_t i = kLimbs; i-- > 0;) {
      if (q[i] != 0) {
        top = static_cast<int>(i * 64 + 63 - std::countl_zero(q[i]));
        break;
      }
    }
    std::uint64_t mant = 0;
    int shift = 0;
    bool round_up = false;
    if (top <= 52) {
      mant = q[0];
      const unsigned __int128 twice = static_cast<unsigned __int128>(rem) * 2;
      round_up = twice > divisor || (twice == divisor && (mant & 1u));
    } else {
      shift = top - 52;
      const auto s = static_cast<std::size_t>(shift);
      mant = bits(q, s, 53);
      const bool half = bit(q, s - 1);
      const bool sticky = rem != 0 || any_below(q, s - 1);
      round_up = half && (sticky || (mant & 1u));
    }
    if (round_up) ++mant;
    return std::ldexp(static_cast<double>(mant), shift - 1074);
  }

  Limbs positive_{};
  Limbs negative_{};
  std::uint64_t count_ = 0;
  bool non_finite_ = false;
};

inline double exact_mean(std::span<const double> values) noexcept {
  ExactSum acc;
  for (double v : values) acc.add(v);
  return acc.mean();
}

}  // namespace fdepth::detail

#endif  // FDEPTH_DETAIL_EXACT_MEAN_HPP
