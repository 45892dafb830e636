// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_PRECISION_HPP
#define MPIR_PRECISION_HPP

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mpir/errors.hpp"
#include "mpir/half.hpp"

namespace mpir
{

enum class Precision
{
  B64,
  B32,
  B16
};

// Half-ulp rounding error bound of the format.
constexpr double unit_roundoff(Precision p)
{
  switch (p)
  {
    case Precision::B64:
      return 0x1p-53;
    case Precision::B32:
      return 0x1p-24;
    default:
      return 0x1p-11;
  }
}

// Spacing of floats just above 1 (one ulp), the tolerance scale used by the
// refinement termination tests.
constexpr double machine_eps(Precision p)
{
  switch (p)
  {
    case Precision::B64:
      return 0x1p-52;
    case Precision::B32:
      return 0x1p-23;
    default:
      return 0x1p-10;
  }
}

constexpr double max_finite(Precision p)
{
  switch (p)
  {
    case Precision::B64:
      return std::numeric_limits<double>::max();
    case Precision::B32:
      return std::numeric_limits<float>::max();
    default:
      return 65504.0;
  }
}

constexpr std::string_view name(Precision p)
{
  switch (p)
  {
    case Precision::B64:
      return "b64";
    case Precision::B32:
      return "b32";
    default:
      return "b16";
  }
}

inline Precision parse_precision(std::string_view s)
{
  if (s == "b64" || s == "B64" || s == "double" || s == "f64")
    return Precision::B64;
  if (s == "b32" || s == "B32" || s == "single" || s == "f32")
    return Precision::B32;
  if (s == "b16" || s == "B16" || s == "half" || s == "f16")
    return Precision::B16;
  throw InvalidParameter("unknown precision '" + std::string(s) + "'");
}

// True when p has at least as many significand bits as q.
constexpr bool at_least_as_wide(Precision p, Precision q)
{
  return unit_roundoff(p) <= unit_roundoff(q);
}

template <typename T>
struct precision_of;
template <>
struct precision_of<double> : std::integral_constant<Precision, Precision::B64>
{
};
template <>
struct precision_of<float> : std::integral_constant<Precision, Precision::B32>
{
};
template <>
struct precision_of<Half> : std::integral_constant<Precision, Precision::B16>
{
};

template <typename T>
inline constexpr Precision precision_of_v = precision_of<T>::value;

template <typename To, typename From>
inline constexpr bool is_widening_v =
    at_least_as_wide(precision_of_v<To>, precision_of_v<From>);

// Exact widening conversions (every narrower value is representable).
inline double promote(double x, double)
{
  return x;
}
inline double promote(float x, double)
{
  return static_cast<double>(x);
}
inline double promote(Half x, double)
{
  return static_cast<double>(x);
}
inline float promote(float x, float)
{
  return x;
}
inline float promote(Half x, float)
{
  return static_cast<float>(x);
}
inline Half promote(Half x, Half)
{
  return x;
}

template <typename To, typename From>
inline To promote_val(From x)
{
  static_assert(is_widening_v<To, From>, "promotion must not lose precision");
  return promote(x, To{});
}

// Rounding conversions. demote_val rounds to nearest even; range checks are
// the caller's job (see demote_checked).
template <typename To, typename From>
inline To demote_val(From x)
{
  static_assert(is_widening_v<From, To>, "demotion must not gain precision");
  if constexpr (std::is_same_v<To, From>)
    return x;
  else
    return To(x);
}

struct DemoteFlags
{
  // Set when a nonzero entry rounded to zero in the target format.
  bool underflow = false;
};

template <typename To, typename From>
inline To demote_checked(From x, DemoteFlags &flags)
{
  using std::abs;
  using std::isfinite;
  if (isfinite(x) && static_cast<double>(abs(x)) > max_finite(precision_of_v<To>))
    throw OverflowDetected("value " + std::to_string(static_cast<double>(x)) +
                           " exceeds the largest finite " +
                           std::string(name(precision_of_v<To>)) + " value");
  To y = demote_val<To>(x);
  if (!flags.underflow && static_cast<double>(y) == 0.0 && static_cast<double>(x) != 0.0)
    flags.underflow = true;
  return y;
}

template <typename To, typename From>
std::vector<To> promote_vector(const std::vector<From> &v)
{
  std::vector<To> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = promote_val<To>(v[i]);
  return out;
}

template <typename To, typename From>
std::vector<To> demote_vector(const std::vector<From> &v, DemoteFlags *flags = nullptr)
{
  DemoteFlags local;
  DemoteFlags &f = flags ? *flags : local;
  std::vector<To> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = demote_checked<To>(v[i], f);
  return out;
}

// Precision selections for a mixed-precision factorization: tw is the working
// precision of the matrix and right-hand sides, tf the factorization storage
// precision, tr the residual evaluation precision.
struct PrecisionConfig
{
  Precision tw = Precision::B64;
  Precision tf = Precision::B32;
  Precision tr = Precision::B64;
  bool on_the_fly = false;

  // Precision in which triangular substitution runs: the working precision
  // when factors are promoted term by term, the factor precision when the
  // residual is scaled down and solved in place.
  Precision ts() const { return on_the_fly ? tw : tf; }

  void validate() const
  {
    if (!at_least_as_wide(tw, tf))
      throw InvalidConfig("factorization precision must not exceed the working precision");
    if (!at_least_as_wide(tr, tw))
      throw InvalidConfig("residual precision must be at least the working precision");
    if (tf == tw && !on_the_fly)
      throw InvalidConfig("equal-precision factors require on-the-fly solves");
  }
};

}  // namespace mpir

#endif  // MPIR_PRECISION_HPP
