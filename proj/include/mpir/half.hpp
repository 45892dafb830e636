// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_HALF_HPP
#define MPIR_HALF_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#if defined(__F16C__)
#include <immintrin.h>
#endif

namespace mpir
{

// IEEE 754 binary16 with round-to-nearest-even conversions. Arithmetic widens
// both operands to binary32, operates there, and rounds the result back; since
// binary32 carries more than 2*11+2 significant bits, every +,-,*,/ below is
// correctly rounded binary16 arithmetic. Conversion from double rounds once,
// directly from the double bits, so it never suffers double rounding through
// binary32.
class Half
{
public:
  Half() = default;
  explicit Half(float f) : bits_(from_float(f)) {}
  explicit Half(double d) : bits_(from_double(d)) {}
  explicit Half(int i) : bits_(from_float(static_cast<float>(i))) {}

  explicit operator float() const { return to_float(bits_); }
  explicit operator double() const { return static_cast<double>(to_float(bits_)); }

  static constexpr Half from_bits(std::uint16_t b)
  {
    Half h;
    h.bits_ = b;
    return h;
  }
  constexpr std::uint16_t bits() const { return bits_; }

  static constexpr Half max_finite() { return from_bits(0x7bff); }   // 65504
  static constexpr Half min_normal() { return from_bits(0x0400); }   // 2^-14
  static constexpr Half min_subnormal() { return from_bits(0x0001); }  // 2^-24

  Half operator-() const { return from_bits(static_cast<std::uint16_t>(bits_ ^ 0x8000u)); }

  friend Half operator+(Half a, Half b) { return Half(float(a) + float(b)); }
  friend Half operator-(Half a, Half b) { return Half(float(a) - float(b)); }
  friend Half operator*(Half a, Half b) { return Half(float(a) * float(b)); }
  friend Half operator/(Half a, Half b) { return Half(float(a) / float(b)); }

  Half &operator+=(Half o) { return *this = *this + o; }
  Half &operator-=(Half o) { return *this = *this - o; }
  Half &operator*=(Half o) { return *this = *this * o; }
  Half &operator/=(Half o) { return *this = *this / o; }

  friend bool operator==(Half a, Half b) { return float(a) == float(b); }
  friend bool operator!=(Half a, Half b) { return float(a) != float(b); }
  friend bool operator<(Half a, Half b) { return float(a) < float(b); }
  friend bool operator<=(Half a, Half b) { return float(a) <= float(b); }
  friend bool operator>(Half a, Half b) { return float(a) > float(b); }
  friend bool operator>=(Half a, Half b) { return float(a) >= float(b); }

  static std::uint16_t from_float(float f)
  {
#if defined(__F16C__)
    return _cvtss_sh(f, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
#else
    return from_float_sw(f);
#endif
  }

  static float to_float(std::uint16_t h)
  {
#if defined(__F16C__)
    return _cvtsh_ss(h);
#else
    return to_float_sw(h);
#endif
  }

  static std::uint16_t from_double(double d) { return from_double_sw(d); }

  // Bit-exact software paths, also usable as references in tests.
  static std::uint16_t from_float_sw(float f)
  {
    const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    const std::uint32_t ax = x & 0x7fffffffu;
    if (ax >= 0x7f800000u)
    {
      if (ax > 0x7f800000u)
        return static_cast<std::uint16_t>(sign | 0x7e00u | ((ax >> 13) & 0x3ffu));
      return static_cast<std::uint16_t>(sign | 0x7c00u);
    }
    int e = static_cast<int>(ax >> 23) - 127 + 15;
    std::uint32_t m = ax & 0x7fffffu;
    if (e >= 31)
      return static_cast<std::uint16_t>(sign | 0x7c00u);
    if (e <= 0)
    {
      if (e < -10)
        return static_cast<std::uint16_t>(sign);
      m |= 0x800000u;
      const int shift = 14 - e;
      const std::uint32_t frac = m >> shift;
      const std::uint32_t rem = m & ((1u << shift) - 1u);
      const std::uint32_t halfway = 1u << (shift - 1);
      std::uint16_t h = static_cast<std::uint16_t>(sign | frac);
      if (rem > halfway || (rem == halfway && (frac & 1u)))
        ++h;
      return h;
    }
    const std::uint32_t frac = m >> 13;
    const std::uint32_t rem = m & 0x1fffu;
    std::uint16_t h =
        static_cast<std::uint16_t>(sign | (static_cast<std::uint32_t>(e) << 10) | frac);
    if (rem > 0x1000u || (rem == 0x1000u && (frac & 1u)))
      ++h;  // carry may roll the exponent, including into infinity
    return h;
  }

  static float to_float_sw(std::uint16_t h)
  {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    std::uint32_t e = (h >> 10) & 0x1fu;
    std::uint32_t m = h & 0x3ffu;
    std::uint32_t out;
    if (e == 31)
      out = sign | 0x7f800000u | (m << 13);
    else if (e == 0)
    {
      if (m == 0)
        out = sign;
      else
      {
        std::uint32_t e32 = 113;
        while (!(m & 0x400u))
        {
          m <<= 1;
          --e32;
        }
        out = sign | (e32 << 23) | ((m & 0x3ffu) << 13);
      }
    }
    else
      out = sign | ((e + 112) << 23) | (m << 13);
    return std::bit_cast<float>(out);
  }

  static std::uint16_t from_double_sw(double d)
  {
    const std::uint64_t x = std::bit_cast<std::uint64_t>(d);
    const std::uint16_t sign = static_cast<std::uint16_t>((x >> 48) & 0x8000u);
    const std::uint64_t ax = x & 0x7fffffffffffffffull;
    if (ax >= 0x7ff0000000000000ull)
    {
      if (ax > 0x7ff0000000000000ull)
        return static_cast<std::uint16_t>(sign | 0x7e00u | ((ax >> 42) & 0x3ffu));
      return static_cast<std::uint16_t>(sign | 0x7c00u);
    }
    if (ax == 0)
      return sign;
    int e = static_cast<int>(ax >> 52) - 1023 + 15;
    std::uint64_t m = ax & 0xfffffffffffffull;
    if (e >= 31)
      return static_cast<std::uint16_t>(sign | 0x7c00u);
    int shift = 42;
    if (e <= 0)
    {
      if (e < -10)
        return sign;
      m |= 1ull << 52;
      shift = 43 - e;
      e = 0;
    }
    const std::uint64_t frac = m >> shift;
    const std::uint64_t rem = m & ((1ull << shift) - 1ull);
    const std::uint64_t halfway = 1ull << (shift - 1);
    std::uint16_t h = static_cast<std::uint16_t>(
        sign | (static_cast<std::uint32_t>(e) << 10) | static_cast<std::uint32_t>(frac));
    if (rem > halfway || (rem == halfway && (frac & 1ull)))
      ++h;
    return h;
  }

private:
  std::uint16_t bits_ = 0;
};

inline Half abs(Half h)
{
  return Half::from_bits(static_cast<std::uint16_t>(h.bits() & 0x7fffu));
}

inline bool isfinite(Half h)
{
  return (h.bits() & 0x7c00u) != 0x7c00u;
}

inline bool isnan(Half h)
{
  return (h.bits() & 0x7c00u) == 0x7c00u && (h.bits() & 0x3ffu) != 0;
}

}  // namespace mpir

#endif  // MPIR_HALF_HPP
