// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_GREENS_HPP
#define MPIR_GREENS_HPP

#include <vector>

#include "mpir/matrix.hpp"
#include "mpir/precision.hpp"

namespace mpir
{

// Green's function for -u'' on [0,1] with homogeneous Dirichlet conditions.
double greens_kernel(double x, double y);

// Nystrom discretization of the integral operator with kernel greens_kernel
// on the uniform n-point grid, trapezoid weights folded into the columns.
// Exactly symmetric; first/last rows and columns are exactly zero.
Matrix<double> build_greens_matrix(int n);

// Grid points x_i = i/(n-1); the last point is pinned to exactly 1.
std::vector<double> greens_grid(int n);

enum class RhsKind
{
  // b = A*ones evaluated in TW, so ones is the exact discrete solution.
  Manufactured,
  // Right-hand side 1 - alpha*x*(1-x)/2, for which u(x) = 1 solves the
  // continuous equation.
  Integral
};

template <typename TW>
struct GreensProblem
{
  int n = 0;
  double alpha = 0.0;
  Matrix<TW> a;            // I - alpha*G rounded to TW
  std::vector<TW> b;
  std::vector<TW> x_exact; // ones
};

namespace detail
{
Matrix<double> build_operator(int n, double alpha);
std::vector<double> integral_rhs(int n, double alpha);
}  // namespace detail

// Assembles A = I - alpha*G in double precision, then rounds once to TW.
template <typename TW>
GreensProblem<TW> build_problem(int n, double alpha, RhsKind kind)
{
  GreensProblem<TW> p;
  p.n = n;
  p.alpha = alpha;
  Matrix<double> a64 = detail::build_operator(n, alpha);
  if constexpr (std::is_same_v<TW, double>)
    p.a = std::move(a64);
  else
    p.a = demote_matrix<TW>(a64);
  p.x_exact.assign(n, TW(1.0f));
  if (kind == RhsKind::Manufactured)
    p.b = matvec_compensated(p.a, p.x_exact);
  else
    p.b = demote_vector<TW>(detail::integral_rhs(n, alpha));
  return p;
}

}  // namespace mpir

#endif  // MPIR_GREENS_HPP
