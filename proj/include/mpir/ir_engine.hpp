// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_IR_ENGINE_HPP
#define MPIR_IR_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "mpir/dense_lu.hpp"
#include "mpir/errors.hpp"
#include "mpir/matrix.hpp"
#include "mpir/mp_structures.hpp"
#include "mpir/precision.hpp"

namespace mpir
{

// Refinement control. With residual termination the loop stops on
//   ||r|| <= cr * eps_w * ||b||,
// otherwise on the normwise backward error test
//   ||r|| <= ce * eps_w * (||b|| + ||A||_1 * ||x||),
// where eps_w is the working precision ulp of 1. A step whose residual (or,
// when the residual precision exceeds the working precision, whose
// correction) shrinks by less than a factor rmax counts as stagnation.
struct TermParams
{
  double cr = 1.0;
  double ce = 1.0;
  double rmax = 0.5;
  int litmax = 10;

  void validate() const
  {
    if (!(cr > 0.0) || !std::isfinite(cr))
      throw InvalidParameter("cr must be positive and finite");
    if (!(ce > 0.0) || !std::isfinite(ce))
      throw InvalidParameter("ce must be positive and finite");
    if (!(rmax > 0.0) || !(rmax <= 1.0))
      throw InvalidParameter("rmax must lie in (0, 1]");
    if (litmax < 1)
      throw InvalidParameter("litmax must be at least 1");
  }
};

inline TermParams update_parms(std::optional<double> cr = {}, std::optional<double> ce = {},
                               std::optional<double> rmax = {},
                               std::optional<int> litmax = {})
{
  TermParams t;
  if (cr)
    t.cr = *cr;
  if (ce)
    t.ce = *ce;
  if (rmax)
    t.rmax = *rmax;
  if (litmax)
    t.litmax = *litmax;
  t.validate();
  return t;
}

enum class StopReason
{
  SmallResidual,
  SmallBackwardError,
  ResidualStagnation,
  CorrectionStagnation,
  IterationLimit
};

constexpr std::string_view to_string(StopReason r)
{
  switch (r)
  {
    case StopReason::SmallResidual:
      return "SmallResidual";
    case StopReason::SmallBackwardError:
      return "SmallBackwardError";
    case StopReason::ResidualStagnation:
      return "ResidualStagnation";
    case StopReason::CorrectionStagnation:
      return "CorrectionStagnation";
    default:
      return "IterationLimit";
  }
}

// Everything a refinement run reports: the solution, the max norm history of
// the residuals (rhist[0] is ||b||) and of the corrections, the inner
// iteration counts when a Krylov solver supplied the corrections, and why the
// loop stopped. rhist is always one longer than dhist.
template <typename TW>
struct SolveReport
{
  std::vector<TW> sol;
  std::vector<double> rhist;
  std::vector<double> dhist;
  std::vector<int> khist;
  StopReason reason = StopReason::IterationLimit;
  bool breakdown = false;
};

namespace detail
{

// r = b - A x with every multiply-accumulate in TR; the TW entries of A and b
// widen at the point of use. x is the TR solution accumulator and comp is
// caller scratch of the same length. Accumulation is compensated: refinement
// converges to whatever solution makes this evaluation vanish, so a plain
// sweep would put an O(n u) floor under the forward error.
template <typename TW, typename TR>
void residual_into(const Matrix<TW> &a, const std::vector<TR> &x, const std::vector<TW> &b,
                   std::vector<TR> &r, std::vector<TR> &comp)
{
  const int n = a.rows();
  for (int i = 0; i < n; ++i)
  {
    r[i] = promote_val<TR>(b[i]);
    comp[i] = TR{};
  }
  for (int j = 0; j < n; ++j)
  {
    const TR xj = x[j];
    const TW *c = a.col(j);
    for (int i = 0; i < n; ++i)
    {
      const TR p = -(promote_val<TR>(c[i]) * xj);
      TR t;
      comp[i] += two_sum(r[i], p, t);
      r[i] = t;
    }
  }
  for (int i = 0; i < n; ++i)
    r[i] += comp[i];
}

// One plain refinement step: solve for the correction with the stored
// factors, add it into the TR solution accumulator, return ||d||. The
// residual buffer is consumed (overwritten by the correction).
template <typename TW, typename TF, typename TR>
double plain_correction(MPFactorization<TW, TF, TR> &f)
{
  auto &r = f.residual_buf();
  auto &x = f.sol_buf();
  const int n = f.n();
  if constexpr (std::is_same_v<TR, TW>)
  {
    if (f.on_the_fly())
      solve_mps_into<TW, TF>(f.packed_lu(), f.ipiv(), r.data());
    else
      solve_lps_into<TW, TF>(f.packed_lu(), f.ipiv(), r.data(), f.low_buf().data());
    for (int i = 0; i < n; ++i)
      x[i] += r[i];
    return norm_inf(r);
  }
  else if (f.on_the_fly())
  {
    // The residual lives in TR; the correction solve runs in the working
    // precision, so round the residual down once and promote the result.
    auto &w = f.work_buf();
    for (int i = 0; i < n; ++i)
      w[i] = demote_val<TW>(r[i]);
    solve_mps_into<TW, TF>(f.packed_lu(), f.ipiv(), w.data());
    for (int i = 0; i < n; ++i)
      x[i] += promote_val<TR>(w[i]);
    return norm_inf(w);
  }
  else
  {
    // Scaled in-place solve straight from the TR residual: a single rounding
    // into TF and a single rescale, with no intermediate stop in TW.
    solve_lps_into<TR, TF>(f.packed_lu(), f.ipiv(), r.data(), f.low_buf().data());
    for (int i = 0; i < n; ++i)
      x[i] += r[i];
    return norm_inf(r);
  }
}

// The refinement loop shared by the plain and Krylov drivers. correct(rep)
// must consume f.residual_buf(), fold the correction into f.sol_buf(), and
// return ||d||; it may push inner iteration counts onto rep.khist.
template <typename TW, typename TF, typename TR, typename Corr>
SolveReport<TW> refine_loop(MPFactorization<TW, TF, TR> &f, const std::vector<TW> &b,
                            const TermParams &tp, Corr &&correct)
{
  tp.validate();
  const int n = f.n();
  if (static_cast<int>(b.size()) != n)
    throw DimensionMismatch("right-hand side length does not match the matrix");

  auto &r = f.residual_buf();
  auto &x = f.sol_buf();
  std::fill(x.begin(), x.end(), TR{});
  for (int i = 0; i < n; ++i)
    r[i] = promote_val<TR>(b[i]);

  SolveReport<TW> rep;
  const double bnorm = norm_inf(r);
  rep.rhist.push_back(bnorm);
  if (!std::isfinite(bnorm))
    throw NonFiniteResult("right-hand side is not finite", rep.rhist, rep.dhist, rep.khist);

  // When the residual precision exceeds the working precision the residual
  // norm tests are meaningless near the working precision floor; progress is
  // judged by the corrections instead.
  constexpr bool extended = !std::is_same_v<TR, TW>;
  const double eps_w = machine_eps(precision_of_v<TW>);
  double rnorm = bnorm;

  while (true)
  {
    double dnorm;
    try
    {
      dnorm = correct(rep);
    }
    catch (const NonFiniteResult &e)
    {
      throw NonFiniteResult(e.what(), rep.rhist, rep.dhist, rep.khist);
    }
    rep.dhist.push_back(dnorm);
    residual_into(f.a_high(), x, b, r, f.comp_buf());
    const double rnew = norm_inf(r);
    rep.rhist.push_back(rnew);
    if (!std::isfinite(rnew) || !std::isfinite(dnorm))
      throw NonFiniteResult("refinement produced a non-finite iterate", rep.rhist,
                            rep.dhist, rep.khist);

    if constexpr (!extended)
    {
      const bool small = f.resid_term()
                             ? rnew <= tp.cr * eps_w * bnorm
                             : rnew <= tp.ce * eps_w * (bnorm + f.a_norm1() * norm_inf(x));
      if (small)
      {
        rep.reason =
            f.resid_term() ? StopReason::SmallResidual : StopReason::SmallBackwardError;
        break;
      }
      if (rnew >= tp.rmax * rnorm)
      {
        rep.reason = StopReason::ResidualStagnation;
        break;
      }
    }
    else
    {
      const auto &dh = rep.dhist;
      if (dh.size() >= 2 && dh.back() >= tp.rmax * dh[dh.size() - 2])
      {
        rep.reason = StopReason::CorrectionStagnation;
        break;
      }
    }
    if (static_cast<int>(rep.rhist.size()) >= tp.litmax)
    {
      rep.reason = StopReason::IterationLimit;
      break;
    }
    rnorm = rnew;
  }

  rep.sol.resize(n);
  for (int i = 0; i < n; ++i)
    rep.sol[i] = demote_val<TW>(x[i]);
  return rep;
}

}  // namespace detail

// Residual of the promoted problem: x widens to TR once, then r = b - A x
// accumulates in TR.
template <typename TW, typename TF, typename TR>
std::vector<TR> residual_tr(const MPFactorization<TW, TF, TR> &f, const std::vector<TW> &x,
                            const std::vector<TW> &b)
{
  if (static_cast<int>(x.size()) != f.n() || static_cast<int>(b.size()) != f.n())
    throw DimensionMismatch("vector length does not match the matrix");
  const std::vector<TR> xr = promote_vector<TR>(x);
  std::vector<TR> r(f.n()), comp(f.n());
  detail::residual_into(f.a_high(), xr, b, r, comp);
  return r;
}

// Iterative refinement with the stored low precision factorization supplying
// the corrections.
template <typename TW, typename TF, typename TR>
SolveReport<TW> ir_solve_report(MPFactorization<TW, TF, TR> &f, const std::vector<TW> &b,
                                const TermParams &tp = {})
{
  return detail::refine_loop(f, b, tp,
                             [&](SolveReport<TW> &) { return detail::plain_correction(f); });
}

template <typename TW, typename TF, typename TR>
std::vector<TW> ir_solve(MPFactorization<TW, TF, TR> &f, const std::vector<TW> &b,
                         const TermParams &tp = {})
{
  return ir_solve_report(f, b, tp).sol;
}

}  // namespace mpir

#endif  // MPIR_IR_ENGINE_HPP
