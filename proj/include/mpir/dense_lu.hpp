// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_DENSE_LU_HPP
#define MPIR_DENSE_LU_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "mpir/errors.hpp"
#include "mpir/matrix.hpp"
#include "mpir/parallel.hpp"
#include "mpir/precision.hpp"

namespace mpir
{

template <typename TF>
struct LUFactors
{
  // Unit lower triangle strictly below the diagonal, upper triangle on and
  // above it, in the storage that held the input matrix.
  Matrix<TF> packed;
  // Row swapped with row k at elimination step k.
  std::vector<int> ipiv;
  // Accumulated permutation: row i of PA is row pivots[i] of A.
  std::vector<int> pivots;
  int n = 0;
};

namespace detail
{

// Replays the elimination's row swaps on a vector, i.e. applies P in place.
template <typename T>
void apply_pivots(const std::vector<int> &ipiv, T *x)
{
  for (std::size_t k = 0; k < ipiv.size(); ++k)
    if (ipiv[k] != static_cast<int>(k))
      std::swap(x[k], x[ipiv[k]]);
}

// Right-looking elimination with partial pivoting, in place. Every element
// update is a single T multiply followed by a T subtract, so results are
// identical for any column blocking or worker count; those only control how
// the independent trailing columns are traversed.
template <typename T>
void lu_inplace(Matrix<T> &a, std::vector<int> &ipiv, std::vector<int> &perm, int block_cols,
                int workers)
{
  if (!a.square())
    throw DimensionMismatch("LU factorization needs a square matrix");
  const int n = a.rows();
  ipiv.assign(n, 0);
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (block_cols < 1)
    block_cols = 1;

  for (int k = 0; k < n; ++k)
  {
    T *ck = a.col(k);
    int p = k;
    double best = std::fabs(static_cast<double>(ck[k]));
    for (int i = k + 1; i < n; ++i)
    {
      const double v = std::fabs(static_cast<double>(ck[i]));
      if (v > best)
      {
        best = v;
        p = i;
      }
    }
    if (best == 0.0)
      throw SingularPivot("pivot column is exactly zero", k);
    ipiv[k] = p;
    if (p != k)
    {
      for (int j = 0; j < n; ++j)
        std::swap(a(k, j), a(p, j));
      std::swap(perm[k], perm[p]);
    }

    const T piv = ck[k];
    for (int i = k + 1; i < n; ++i)
      ck[i] = ck[i] / piv;

    const int first = k + 1;
    const int ncols = n - first;
    if (ncols <= 0)
      continue;
    const int nblocks = (ncols + block_cols - 1) / block_cols;
    const int w = (ncols >= 128) ? workers : 1;
    parallel_blocks(nblocks, w, [&](int b) {
      const int j0 = first + b * block_cols;
      const int j1 = std::min(n, j0 + block_cols);
      for (int j = j0; j < j1; ++j)
      {
        T *cj = a.col(j);
        const T ukj = cj[k];
        for (int i = first; i < n; ++i)
          cj[i] = cj[i] - ck[i] * ukj;
      }
    });
  }
}

// Substitution runs in TS; factor entries promote to TS at the point of use.
template <typename TS, typename TF>
void trsv_lower_unit(const Matrix<TF> &lu, TS *x)
{
  const int n = lu.rows();
  for (int k = 0; k < n; ++k)
  {
    const TF *ck = lu.col(k);
    const TS xk = x[k];
    for (int i = k + 1; i < n; ++i)
      x[i] = x[i] - promote_val<TS>(ck[i]) * xk;
  }
}

template <typename TS, typename TF>
void trsv_upper(const Matrix<TF> &lu, TS *x)
{
  const int n = lu.rows();
  for (int k = n - 1; k >= 0; --k)
  {
    const TF *ck = lu.col(k);
    x[k] = x[k] / promote_val<TS>(ck[k]);
    const TS xk = x[k];
    for (int i = 0; i < k; ++i)
      x[i] = x[i] - promote_val<TS>(ck[i]) * xk;
  }
}

template <typename T>
void check_finite(const T *x, int n, const char *what)
{
  using std::isfinite;
  for (int i = 0; i < n; ++i)
    if (!isfinite(x[i]))
      throw NonFiniteResult(std::string(what) + " produced a non-finite entry");
}

}  // namespace detail

// Sequential factorization for any element type.
template <typename T>
LUFactors<T> lu_factor(Matrix<T> a)
{
  LUFactors<T> f;
  f.n = a.rows();
  detail::lu_inplace(a, f.ipiv, f.pivots, a.cols(), 1);
  f.packed = std::move(a);
  return f;
}

// Binary16 factorization with a column-blocked trailing update distributed
// over worker threads (capped by MPIR_THREADS). Bitwise identical to the
// sequential path for any worker count.
inline LUFactors<Half> lu_factor_half(Matrix<Half> a, int block_cols = 32)
{
  LUFactors<Half> f;
  f.n = a.rows();
  detail::lu_inplace(a, f.ipiv, f.pivots, block_cols, detail::max_workers());
  f.packed = std::move(a);
  return f;
}

// Promoting substitution: solves LU d = P r with all arithmetic in TS and the
// TF factor entries widened term by term. In-place variants; no allocation.
template <typename TS, typename TF>
void solve_mps_into(const Matrix<TF> &packed, const std::vector<int> &ipiv, TS *x)
{
  detail::apply_pivots(ipiv, x);
  detail::trsv_lower_unit<TS, TF>(packed, x);
  detail::trsv_upper<TS, TF>(packed, x);
  detail::check_finite(x, packed.rows(), "promoting substitution");
}

template <typename TS, typename TF>
void solve_mps_into(const LUFactors<TF> &f, TS *x)
{
  solve_mps_into<TS, TF>(f.packed, f.ipiv, x);
}

template <typename TS, typename TF>
std::vector<TS> solve_mps(const LUFactors<TF> &f, std::vector<TS> r)
{
  if (static_cast<int>(r.size()) != f.n)
    throw DimensionMismatch("right-hand side length does not match the factorization");
  solve_mps_into(f, r.data());
  return r;
}

// Scaled in-place substitution: normalizes r by its max norm, rounds the
// scaled residual down to TF, substitutes entirely in TF, then widens and
// rescales the result in a single multiply. A zero residual short-circuits to
// a zero correction. flags->underflow records scaled entries that flushed to
// zero in TF.
template <typename TW, typename TF>
void solve_lps_into(const Matrix<TF> &packed, const std::vector<int> &ipiv, TW *r_to_d,
                    TF *scratch, DemoteFlags *flags = nullptr)
{
  const int n = packed.rows();
  TW rho = TW(0.0f);
  for (int i = 0; i < n; ++i)
  {
    const TW a = r_to_d[i] < TW(0.0f) ? -r_to_d[i] : r_to_d[i];
    if (a > rho)
      rho = a;
  }
  if (rho == TW(0.0f))
  {
    for (int i = 0; i < n; ++i)
      r_to_d[i] = TW(0.0f);
    return;
  }
  DemoteFlags local;
  DemoteFlags &fl = flags ? *flags : local;
  for (int i = 0; i < n; ++i)
    scratch[i] = demote_checked<TF>(r_to_d[i] / rho, fl);
  detail::apply_pivots(ipiv, scratch);
  detail::trsv_lower_unit<TF, TF>(packed, scratch);
  detail::trsv_upper<TF, TF>(packed, scratch);
  for (int i = 0; i < n; ++i)
    r_to_d[i] = promote_val<TW>(scratch[i]) * rho;
  detail::check_finite(r_to_d, n, "scaled substitution");
}

template <typename TW, typename TF>
void solve_lps_into(const LUFactors<TF> &f, TW *r_to_d, TF *scratch,
                    DemoteFlags *flags = nullptr)
{
  solve_lps_into<TW, TF>(f.packed, f.ipiv, r_to_d, scratch, flags);
}

template <typename TW, typename TF>
std::vector<TW> solve_lps(const LUFactors<TF> &f, std::vector<TW> r,
                          DemoteFlags *flags = nullptr)
{
  if (static_cast<int>(r.size()) != f.n)
    throw DimensionMismatch("right-hand side length does not match the factorization");
  std::vector<TF> scratch(f.n);
  solve_lps_into(f, r.data(), scratch.data(), flags);
  return r;
}

}  // namespace mpir

#endif  // MPIR_DENSE_LU_HPP
