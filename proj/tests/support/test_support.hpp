// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_TEST_SUPPORT_HPP
#define MPIR_TEST_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "mpir/dense_lu.hpp"
#include "mpir/matrix.hpp"

namespace mpir::testing
{

template <typename T>
Matrix<T> random_matrix(int n, std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix<T> a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      a(i, j) = T(dist(rng));
  return a;
}

// Random matrix with a dominant diagonal, comfortably well conditioned.
template <typename T>
Matrix<T> random_diag_dominant(int n, std::mt19937_64 &rng)
{
  Matrix<T> a = random_matrix<T>(n, rng);
  for (int i = 0; i < n; ++i)
    a(i, i) = T(static_cast<double>(a(i, i)) + 2.0 * n);
  return a;
}

template <typename T>
std::vector<T> random_vector(int n, std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> v(n);
  for (auto &x : v)
    x = T(dist(rng));
  return v;
}

// Rows of the result are rows perm[i] of a.
template <typename T>
Matrix<double> permuted_rows(const Matrix<T> &a, const std::vector<int> &perm)
{
  Matrix<double> out(a.rows(), a.cols());
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      out(i, j) = static_cast<double>(a(perm[i], j));
  return out;
}

// L*U evaluated in double from a packed factor matrix.
template <typename TF>
Matrix<double> reconstruct(const Matrix<TF> &packed)
{
  const int n = packed.rows();
  Matrix<double> out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
    {
      double s = 0.0;
      const int kmax = std::min(i, j);
      for (int k = 0; k <= kmax; ++k)
      {
        const double lik = (k == i) ? 1.0 : static_cast<double>(packed(i, k));
        s += lik * static_cast<double>(packed(k, j));
      }
      out(i, j) = s;
    }
  return out;
}

// max_ij |PA - LU| evaluated in double.
template <typename TF, typename TA>
double reconstruction_residual(const LUFactors<TF> &f, const Matrix<TA> &a)
{
  const Matrix<double> pa = permuted_rows(a, f.pivots);
  const Matrix<double> lu = reconstruct(f.packed);
  double m = 0.0;
  for (int j = 0; j < f.n; ++j)
    for (int i = 0; i < f.n; ++i)
      m = std::max(m, std::fabs(pa(i, j) - lu(i, j)));
  return m;
}

// Pivot-free Doolittle factorization in double using the dot-product form, an
// independent check for the outer-product elimination kernel. Returns the
// packed factors of the (pre-permuted) input.
inline Matrix<double> doolittle_nopivot(const Matrix<double> &a)
{
  const int n = a.rows();
  Matrix<double> lu(n, n);
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i <= j; ++i)
    {
      double s = a(i, j);
      for (int k = 0; k < i; ++k)
        s -= lu(i, k) * lu(k, j);
      lu(i, j) = s;
    }
    for (int i = j + 1; i < n; ++i)
    {
      double s = a(i, j);
      for (int k = 0; k < j; ++k)
        s -= lu(i, k) * lu(k, j);
      lu(i, j) = s / lu(j, j);
    }
  }
  return lu;
}

template <typename T>
double max_abs_diff(const std::vector<T> &a, const std::vector<T> &b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

}  // namespace mpir::testing

#endif  // MPIR_TEST_SUPPORT_HPP
