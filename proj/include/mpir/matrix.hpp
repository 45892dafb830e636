// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_MATRIX_HPP
#define MPIR_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "mpir/errors.hpp"
#include "mpir/precision.hpp"

namespace mpir
{

// Dense column-major matrix. Column-major keeps the inner loops of the
// factorization and substitution kernels on contiguous memory.
template <typename T>
class Matrix
{
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, T{})
  {
    if (rows < 0 || cols < 0)
      throw InvalidSize("matrix dimensions must be nonnegative");
  }

  static Matrix identity(int n)
  {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      m(i, i) = T(1.0f);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T &operator()(int i, int j) { return data_[std::size_t(j) * rows_ + i]; }
  const T &operator()(int i, int j) const { return data_[std::size_t(j) * rows_ + i]; }

  T *col(int j) { return data_.data() + std::size_t(j) * rows_; }
  const T *col(int j) const { return data_.data() + std::size_t(j) * rows_; }

  T *data() { return data_.data(); }
  const T *data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  friend bool operator==(const Matrix &a, const Matrix &b)
  {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <typename To, typename From>
Matrix<To> promote_matrix(const Matrix<From> &a)
{
  Matrix<To> out(a.rows(), a.cols());
  const From *src = a.data();
  To *dst = out.data();
  for (std::size_t i = 0; i < a.size(); ++i)
    dst[i] = promote_val<To>(src[i]);
  return out;
}

template <typename To, typename From>
void demote_matrix_into(const Matrix<From> &a, Matrix<To> &out, DemoteFlags *flags = nullptr)
{
  if (out.rows() != a.rows() || out.cols() != a.cols())
    throw DimensionMismatch("demotion target has the wrong shape");
  DemoteFlags local;
  DemoteFlags &f = flags ? *flags : local;
  const From *src = a.data();
  To *dst = out.data();
  for (std::size_t i = 0; i < a.size(); ++i)
    dst[i] = demote_checked<To>(src[i], f);
}

template <typename To, typename From>
Matrix<To> demote_matrix(const Matrix<From> &a, DemoteFlags *flags = nullptr)
{
  Matrix<To> out(a.rows(), a.cols());
  demote_matrix_into(a, out, flags);
  return out;
}

template <typename T>
double norm_inf(const std::vector<T> &v)
{
  double m = 0.0;
  for (const T &x : v)
  {
    const double a = std::fabs(static_cast<double>(x));
    if (a > m || std::isnan(a))
      m = a;
  }
  return m;
}

// Max absolute row sum, accumulated in double.
template <typename T>
double matrix_inf_norm(const Matrix<T> &a)
{
  std::vector<double> rowsum(a.rows(), 0.0);
  for (int j = 0; j < a.cols(); ++j)
  {
    const T *c = a.col(j);
    for (int i = 0; i < a.rows(); ++i)
      rowsum[i] += std::fabs(static_cast<double>(c[i]));
  }
  double m = 0.0;
  for (double s : rowsum)
    if (s > m)
      m = s;
  return m;
}

// y = A x in T arithmetic.
template <typename T>
void matvec_into(const Matrix<T> &a, const T *x, T *y)
{
  const int nr = a.rows(), nc = a.cols();
  for (int i = 0; i < nr; ++i)
    y[i] = T{};
  for (int j = 0; j < nc; ++j)
  {
    const T *c = a.col(j);
    const T xj = x[j];
    for (int i = 0; i < nr; ++i)
      y[i] += c[i] * xj;
  }
}

template <typename T>
std::vector<T> matvec(const Matrix<T> &a, const std::vector<T> &x)
{
  if (static_cast<int>(x.size()) != a.cols())
    throw DimensionMismatch("matvec operand length does not match matrix columns");
  std::vector<T> y(a.rows());
  matvec_into(a, x.data(), y.data());
  return y;
}

namespace detail
{

// Exact rounding error of t = fl(s + p) (Knuth's branch-free two-sum). p is
// read twice on purpose: a product feeding it then has two uses and cannot be
// contracted into the add.
template <typename T>
inline T two_sum(T s, T p, T &t)
{
  t = s + p;
  const T z = t - s;
  return (s - (t - z)) + (p - z);
}

}  // namespace detail

// y = A x with compensated per-entry accumulation, still entirely in T
// arithmetic. The plain column sweep rounds n times per entry and the bias
// grows with n; the compensated sweep keeps the evaluation within a few ulps
// of exact at any size, which is what a manufactured right-hand side needs if
// ones is to stay the solution to working accuracy.
template <typename T>
std::vector<T> matvec_compensated(const Matrix<T> &a, const std::vector<T> &x)
{
  if (static_cast<int>(x.size()) != a.cols())
    throw DimensionMismatch("matvec operand length does not match matrix columns");
  const int nr = a.rows(), nc = a.cols();
  std::vector<T> y(nr, T{}), comp(nr, T{});
  for (int j = 0; j < nc; ++j)
  {
    const T *c = a.col(j);
    const T xj = x[j];
    for (int i = 0; i < nr; ++i)
    {
      const T p = c[i] * xj;
      T t;
      comp[i] += detail::two_sum(y[i], p, t);
      y[i] = t;
    }
  }
  for (int i = 0; i < nr; ++i)
    y[i] += comp[i];
  return y;
}

}  // namespace mpir

#endif  // MPIR_MATRIX_HPP
