// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpir/greens.hpp"

#include "mpir/errors.hpp"

namespace mpir
{

double greens_kernel(double x, double y)
{
  return x > y ? y * (1.0 - x) : x * (1.0 - y);
}

std::vector<double> greens_grid(int n)
{
  if (n < 2)
    throw InvalidSize("grid needs at least two points");
  const double h = 1.0 / (n - 1);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = i * h;
  x[n - 1] = 1.0;
  return x;
}

Matrix<double> build_greens_matrix(int n)
{
  if (n < 3)
    throw InvalidSize("operator needs at least three grid points");
  const std::vector<double> x = greens_grid(n);
  const double h = 1.0 / (n - 1);
  Matrix<double> g(n, n);
  for (int j = 0; j < n; ++j)
  {
    const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
    double *c = g.col(j);
    for (int i = 0; i < n; ++i)
      c[i] = greens_kernel(x[i], x[j]) * w;
  }
  return g;
}

namespace detail
{

Matrix<double> build_operator(int n, double alpha)
{
  Matrix<double> a = build_greens_matrix(n);
  for (int j = 0; j < n; ++j)
  {
    double *c = a.col(j);
    for (int i = 0; i < n; ++i)
      c[i] = -alpha * c[i];
    c[j] += 1.0;
  }
  return a;
}

std::vector<double> integral_rhs(int n, double alpha)
{
  const std::vector<double> x = greens_grid(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i)
    b[i] = 1.0 - alpha * x[i] * (1.0 - x[i]) * 0.5;
  return b;
}

}  // namespace detail

}  // namespace mpir
