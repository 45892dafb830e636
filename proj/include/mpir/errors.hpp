// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_ERRORS_HPP
#define MPIR_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace mpir
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A value does not fit in the target precision (|x| above the largest finite value).
class OverflowDetected : public Error
{
public:
  using Error::Error;
};

// Elimination hit an exactly zero pivot column.
class SingularPivot : public Error
{
public:
  SingularPivot(const std::string &msg, int col) : Error(msg), column(col) {}
  int column;
};

// A solver produced an infinity or NaN.
class NonFiniteResult : public Error
{
public:
  using Error::Error;
  NonFiniteResult(const std::string &msg, std::vector<double> rh, std::vector<double> dh,
                  std::vector<int> kh)
    : Error(msg), rhist(std::move(rh)), dhist(std::move(dh)), khist(std::move(kh))
  {
  }

  // Partial convergence history up to the blow-up.
  std::vector<double> rhist, dhist;
  std::vector<int> khist;
};

class DimensionMismatch : public Error
{
public:
  using Error::Error;
};

// Requested precision combination is not supported.
class InvalidConfig : public Error
{
public:
  using Error::Error;
};

class InvalidParameter : public Error
{
public:
  using Error::Error;
};

// Iterative solve used as a direct solver failed to reach its tolerance.
class NotConverged : public Error
{
public:
  NotConverged(const std::string &msg, int its, double res, std::vector<double> x)
    : Error(msg), iters(its), resnorm(res), sol(std::move(x))
  {
  }

  int iters;
  double resnorm;
  std::vector<double> sol;
};

class UnknownTable : public Error
{
public:
  using Error::Error;
};

class InvalidSize : public Error
{
public:
  using Error::Error;
};

}  // namespace mpir

#endif  // MPIR_ERRORS_HPP
