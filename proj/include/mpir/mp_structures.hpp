// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_MP_STRUCTURES_HPP
#define MPIR_MP_STRUCTURES_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "mpir/dense_lu.hpp"
#include "mpir/errors.hpp"
#include "mpir/matrix.hpp"
#include "mpir/parallel.hpp"
#include "mpir/precision.hpp"

namespace mpir
{

// Max absolute column sum, accumulated in the matrix's own precision.
template <typename T>
double matrix_one_norm(const Matrix<T> &a)
{
  using std::abs;
  double best = 0.0;
  for (int j = 0; j < a.cols(); ++j)
  {
    T s{};
    const T *c = a.col(j);
    for (int i = 0; i < a.rows(); ++i)
      s += abs(c[i]);
    best = std::max(best, static_cast<double>(s));
  }
  return best;
}

// Fills in the precision selections the caller left open: the residual
// precision defaults to the working precision, the factor precision drops one
// format below the working precision, and in-place scaled solves are the
// default except for binary16 factors, where term-by-term promotion is both
// safer and the only reasonable choice. Equal factor and working precisions
// force promotion solves since there is nothing to scale into.
inline PrecisionConfig resolve_config(Precision tw, std::optional<Precision> tf = {},
                                      std::optional<Precision> tr = {},
                                      std::optional<bool> on_the_fly = {})
{
  if (tw == Precision::B16)
    throw InvalidConfig("working precision must be b64 or b32");
  PrecisionConfig c;
  c.tw = tw;
  c.tr = tr.value_or(tw);
  c.tf = tf.value_or(tw == Precision::B32 ? Precision::B16 : Precision::B32);
  c.on_the_fly = on_the_fly.value_or(c.tf == Precision::B16);
  if (c.tf == c.tw)
    c.on_the_fly = true;
  c.validate();
  return c;
}

enum class KrylovKind
{
  None,
  Gmres,
  Bicgstab
};

template <typename TW>
struct KrylovWorkspace
{
  KrylovKind kind = KrylovKind::None;
  int basissize = 0;
  // Arnoldi basis (basissize+1 vectors) and Hessenberg matrix, with the
  // Givens rotation state for the least-squares solve.
  std::vector<std::vector<TW>> basis;
  Matrix<TW> hess;
  std::vector<TW> cs, sn, g, y;
  // Stabilized bi-conjugate gradient scratch: z, r, rhat, p, v, s, t.
  std::vector<std::vector<TW>> scratch;
};

struct FactorOptions
{
  // Terminate refinement on the cheap small-residual test rather than the
  // normwise backward error test.
  bool resid_term = true;
  // Promote factor entries term by term during substitution instead of
  // scaling the residual into the factor precision.
  std::optional<bool> on_the_fly;
};

// A matrix bound to its low precision factorization plus the preallocated
// solver state: one copy of A in the working precision TW, the packed LU
// factors in TF occupying what was the low precision copy, residual/solution
// accumulators in TR, and optional Krylov scratch. Refinement never allocates
// after construction.
template <typename TW, typename TF, typename TR = TW>
class MPFactorization
{
  static_assert(at_least_as_wide(precision_of_v<TW>, precision_of_v<TF>));
  static_assert(at_least_as_wide(precision_of_v<TR>, precision_of_v<TW>));

public:
  using working_type = TW;
  using factor_type = TF;
  using residual_type = TR;

  MPFactorization(Matrix<TW> a, FactorOptions opts = {},
                  KrylovKind krylov = KrylovKind::None, int basissize = 0)
    : a_high_(std::move(a))
  {
    if (!a_high_.square())
      throw DimensionMismatch("matrix must be square");
    n_ = a_high_.rows();
    config_.tw = precision_of_v<TW>;
    config_.tf = precision_of_v<TF>;
    config_.tr = precision_of_v<TR>;
    config_.on_the_fly =
        opts.on_the_fly.value_or(std::is_same_v<TF, Half> || std::is_same_v<TF, TW>);
    if (std::is_same_v<TF, TW>)
      config_.on_the_fly = true;
    config_.validate();
    resid_term_ = opts.resid_term;

    a_low_ = Matrix<TF>(n_, n_);
    residual_buf_.resize(n_);
    sol_buf_.resize(n_);
    comp_buf_.resize(n_);
    low_buf_.resize(n_);
    work_buf_.resize(n_);
    refactor(a_high_);

    if (krylov != KrylovKind::None)
    {
      if (basissize < 1)
        throw InvalidParameter("Krylov basis budget must be at least 1");
      krylov_.kind = krylov;
      krylov_.basissize = basissize;
      if (krylov == KrylovKind::Gmres)
      {
        krylov_.basis.assign(basissize + 1, std::vector<TW>(n_));
        krylov_.hess = Matrix<TW>(basissize + 1, basissize);
        krylov_.cs.assign(basissize, TW{});
        krylov_.sn.assign(basissize, TW{});
        krylov_.g.assign(basissize + 1, TW{});
        krylov_.y.assign(basissize, TW{});
      }
      else
        krylov_.scratch.assign(7, std::vector<TW>(n_));
    }
  }

  // Reuses every buffer: copies the new matrix over the high precision copy,
  // rounds it into the factor storage, and factors in place.
  MPFactorization &refactor(const Matrix<TW> &a)
  {
    if (a.rows() != n_ || a.cols() != n_)
      throw DimensionMismatch("refactor matrix has a different shape");
    if (&a != &a_high_)
      std::copy(a.data(), a.data() + a.size(), a_high_.data());
    anorm1_ = matrix_one_norm(a_high_);
    demote_flags_ = DemoteFlags{};
    demote_matrix_into(a_high_, a_low_, &demote_flags_);
    if constexpr (std::is_same_v<TF, Half>)
      detail::lu_inplace(a_low_, ipiv_, perm_, 32, detail::max_workers());
    else
      detail::lu_inplace(a_low_, ipiv_, perm_, n_, 1);
    return *this;
  }

  int n() const { return n_; }
  const PrecisionConfig &config() const { return config_; }
  bool on_the_fly() const { return config_.on_the_fly; }
  bool resid_term() const { return resid_term_; }
  double a_norm1() const { return anorm1_; }
  bool demotion_underflowed() const { return demote_flags_.underflow; }

  const Matrix<TW> &a_high() const { return a_high_; }
  // The factor storage is the low precision copy of A, overwritten in place.
  const Matrix<TF> &packed_lu() const { return a_low_; }
  const std::vector<int> &ipiv() const { return ipiv_; }
  const std::vector<int> &pivots() const { return perm_; }

  KrylovWorkspace<TW> &krylov() { return krylov_; }
  const KrylovWorkspace<TW> &krylov() const { return krylov_; }

  // Preallocated solver state; the refinement loop owns these during a solve.
  std::vector<TR> &residual_buf() { return residual_buf_; }
  std::vector<TR> &sol_buf() { return sol_buf_; }
  std::vector<TR> &comp_buf() { return comp_buf_; }
  std::vector<TF> &low_buf() { return low_buf_; }
  std::vector<TW> &work_buf() { return work_buf_; }

  // Bytes held in the two matrix copies (the refinement storage ledger).
  std::size_t matrix_bytes() const
  {
    return a_high_.size() * sizeof(TW) + a_low_.size() * sizeof(TF);
  }

private:
  Matrix<TW> a_high_;
  Matrix<TF> a_low_;
  std::vector<int> ipiv_, perm_;
  std::vector<TR> residual_buf_, sol_buf_, comp_buf_;
  std::vector<TF> low_buf_;
  std::vector<TW> work_buf_;
  KrylovWorkspace<TW> krylov_;
  PrecisionConfig config_;
  DemoteFlags demote_flags_;
  double anorm1_ = 0.0;
  bool resid_term_ = true;
  int n_ = 0;
};

template <typename TW, typename TF, typename TR = TW>
MPFactorization<TW, TF, TR> mp_lu(Matrix<TW> a, FactorOptions opts = {})
{
  return MPFactorization<TW, TF, TR>(std::move(a), opts);
}

template <typename TW, typename TF, typename TR = TW>
MPFactorization<TW, TF, TR> mp_glu(Matrix<TW> a, int basissize = 10, FactorOptions opts = {})
{
  return MPFactorization<TW, TF, TR>(std::move(a), opts, KrylovKind::Gmres, basissize);
}

template <typename TW, typename TF, typename TR = TW>
MPFactorization<TW, TF, TR> mp_blu(Matrix<TW> a, int budget = 10, FactorOptions opts = {})
{
  return MPFactorization<TW, TF, TR>(std::move(a), opts, KrylovKind::Bicgstab, budget);
}

template <typename TW, typename TF, typename TR>
MPFactorization<TW, TF, TR> &mp_refactor(MPFactorization<TW, TF, TR> &f, const Matrix<TW> &a)
{
  return f.refactor(a);
}

}  // namespace mpir

#endif  // MPIR_MP_STRUCTURES_HPP
