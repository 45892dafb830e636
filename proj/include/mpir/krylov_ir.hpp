// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_KRYLOV_IR_HPP
#define MPIR_KRYLOV_IR_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mpir/dense_lu.hpp"
#include "mpir/errors.hpp"
#include "mpir/ir_engine.hpp"
#include "mpir/matrix.hpp"
#include "mpir/mp_structures.hpp"

namespace mpir
{

namespace detail
{

template <typename TW>
TW dot(const TW *a, const TW *b, int n)
{
  TW s{};
  for (int i = 0; i < n; ++i)
    s += a[i] * b[i];
  return s;
}

template <typename TW>
TW nrm2(const TW *a, int n)
{
  return std::sqrt(dot(a, a, n));
}

// In-place application of the low precision preconditioner in the working
// precision: v <- U^-1 L^-1 P v with factor entries promoted term by term.
template <typename TW, typename TF, typename TR>
void apply_precond(const MPFactorization<TW, TF, TR> &f, TW *v)
{
  solve_mps_into<TW, TF>(f.packed_lu(), f.ipiv(), v);
}

}  // namespace detail

struct KrylovStats
{
  int iters = 0;
  bool breakdown = false;
};

// One left-preconditioned GMRES solve of A d = r to a loose relative
// tolerance, using the workspace carried by the factorization: modified
// Gram-Schmidt Arnoldi with Givens rotations on the Hessenberg matrix, no
// restarts, at most `budget` basis vectors. d may alias r. A vanishing
// Arnoldi vector before the tolerance is met is flagged as a breakdown; the
// correction from the basis built so far is still returned.
template <typename TW, typename TF, typename TR>
KrylovStats gmres_correction_into(MPFactorization<TW, TF, TR> &f, const TW *r, TW *d,
                                  int budget, double rtol = 1e-2)
{
  auto &ws = f.krylov();
  if (ws.kind != KrylovKind::Gmres)
    throw InvalidConfig("factorization carries no GMRES workspace");
  if (budget < 1 || budget > ws.basissize)
    throw InvalidParameter("GMRES budget must lie in [1, basissize]");
  const int n = f.n();

  auto &v0 = ws.basis[0];
  std::copy(r, r + n, v0.begin());
  detail::apply_precond(f, v0.data());
  const TW beta = detail::nrm2(v0.data(), n);
  std::fill(d, d + n, TW{});
  if (beta == TW{})
    return {0, false};
  const TW invbeta = TW(1.0f) / beta;
  for (int i = 0; i < n; ++i)
    v0[i] *= invbeta;
  std::fill(ws.g.begin(), ws.g.end(), TW{});
  ws.g[0] = beta;

  const double target = rtol * static_cast<double>(beta);
  int k = 0;
  bool brk = false;
  for (int j = 0; j < budget; ++j)
  {
    auto &w = ws.basis[j + 1];
    matvec_into(f.a_high(), ws.basis[j].data(), w.data());
    detail::apply_precond(f, w.data());
    for (int i = 0; i <= j; ++i)
    {
      const TW hij = detail::dot(w.data(), ws.basis[i].data(), n);
      ws.hess(i, j) = hij;
      const TW *vi = ws.basis[i].data();
      for (int l = 0; l < n; ++l)
        w[l] -= hij * vi[l];
    }
    const TW hj1 = detail::nrm2(w.data(), n);
    ws.hess(j + 1, j) = hj1;
    if (hj1 > TW{})
    {
      const TW inv = TW(1.0f) / hj1;
      for (int l = 0; l < n; ++l)
        w[l] *= inv;
    }

    for (int i = 0; i < j; ++i)
    {
      const TW t = ws.cs[i] * ws.hess(i, j) + ws.sn[i] * ws.hess(i + 1, j);
      ws.hess(i + 1, j) = -ws.sn[i] * ws.hess(i, j) + ws.cs[i] * ws.hess(i + 1, j);
      ws.hess(i, j) = t;
    }
    const TW ha = ws.hess(j, j);
    const TW hb = ws.hess(j + 1, j);
    const TW rr = std::hypot(ha, hb);
    if (rr == TW{})
    {
      ws.cs[j] = TW(1.0f);
      ws.sn[j] = TW{};
    }
    else
    {
      ws.cs[j] = ha / rr;
      ws.sn[j] = hb / rr;
    }
    ws.hess(j, j) = ws.cs[j] * ha + ws.sn[j] * hb;
    ws.hess(j + 1, j) = TW{};
    const TW gj = ws.g[j];
    ws.g[j] = ws.cs[j] * gj;
    ws.g[j + 1] = -ws.sn[j] * gj;

    k = j + 1;
    const double res = std::fabs(static_cast<double>(ws.g[j + 1]));
    if (res <= target)
      break;
    if (hj1 == TW{})
    {
      brk = true;
      break;
    }
  }

  for (int i = k - 1; i >= 0; --i)
  {
    TW s = ws.g[i];
    for (int l = i + 1; l < k; ++l)
      s -= ws.hess(i, l) * ws.y[l];
    if (ws.hess(i, i) == TW{})
    {
      ws.y[i] = TW{};
      brk = true;
    }
    else
      ws.y[i] = s / ws.hess(i, i);
  }
  for (int l = 0; l < k; ++l)
  {
    const TW yl = ws.y[l];
    const TW *vl = ws.basis[l].data();
    for (int i = 0; i < n; ++i)
      d[i] += yl * vl[i];
  }
  return {k, brk};
}

// One left-preconditioned stabilized bi-conjugate gradient solve of A d = r,
// running entirely in the seven preallocated workspace vectors. d may alias
// r. Exact zeros in the recurrence scalars flag a breakdown; the correction
// accumulated so far is returned.
template <typename TW, typename TF, typename TR>
KrylovStats bicgstab_correction_into(MPFactorization<TW, TF, TR> &f, const TW *rin, TW *d,
                                     int budget, double rtol = 0.1)
{
  auto &ws = f.krylov();
  if (ws.kind != KrylovKind::Bicgstab)
    throw InvalidConfig("factorization carries no bi-conjugate gradient workspace");
  if (budget < 1)
    throw InvalidParameter("iteration budget must be positive");
  const int n = f.n();
  auto &z = ws.scratch[0];
  auto &rr = ws.scratch[1];
  auto &rhat = ws.scratch[2];
  auto &p = ws.scratch[3];
  auto &v = ws.scratch[4];
  auto &s = ws.scratch[5];
  auto &t = ws.scratch[6];

  std::copy(rin, rin + n, z.begin());
  detail::apply_precond(f, z.data());
  std::fill(d, d + n, TW{});
  const double znorm = static_cast<double>(detail::nrm2(z.data(), n));
  if (znorm == 0.0)
    return {0, false};
  const double target = rtol * znorm;

  std::copy(z.begin(), z.end(), rr.begin());
  std::copy(z.begin(), z.end(), rhat.begin());
  std::copy(z.begin(), z.end(), p.begin());
  TW rho = detail::dot(rhat.data(), rr.data(), n);

  int it = 0;
  bool brk = false;
  while (it < budget)
  {
    matvec_into(f.a_high(), p.data(), v.data());
    detail::apply_precond(f, v.data());
    const TW denom = detail::dot(rhat.data(), v.data(), n);
    if (denom == TW{})
    {
      brk = true;
      break;
    }
    const TW alpha = rho / denom;
    for (int i = 0; i < n; ++i)
      s[i] = rr[i] - alpha * v[i];
    for (int i = 0; i < n; ++i)
      d[i] += alpha * p[i];
    ++it;
    if (static_cast<double>(detail::nrm2(s.data(), n)) <= target)
      break;
    matvec_into(f.a_high(), s.data(), t.data());
    detail::apply_precond(f, t.data());
    const TW tt = detail::dot(t.data(), t.data(), n);
    if (tt == TW{})
    {
      brk = true;
      break;
    }
    const TW omega = detail::dot(t.data(), s.data(), n) / tt;
    for (int i = 0; i < n; ++i)
      d[i] += omega * s[i];
    for (int i = 0; i < n; ++i)
      rr[i] = s[i] - omega * t[i];
    if (static_cast<double>(detail::nrm2(rr.data(), n)) <= target)
      break;
    const TW rho_new = detail::dot(rhat.data(), rr.data(), n);
    if (rho_new == TW{} || omega == TW{})
    {
      brk = true;
      break;
    }
    const TW beta = (rho_new / rho) * (alpha / omega);
    for (int i = 0; i < n; ++i)
      p[i] = rr[i] + beta * (p[i] - omega * v[i]);
    rho = rho_new;
  }
  return {it, brk};
}

template <typename TW>
struct CorrectionResult
{
  std::vector<TW> d;
  int iters = 0;
  bool breakdown = false;
};

template <typename TW, typename TF, typename TR>
CorrectionResult<TW> gmres_correction(MPFactorization<TW, TF, TR> &f,
                                      const std::vector<TW> &r, int basissize = 0)
{
  if (static_cast<int>(r.size()) != f.n())
    throw DimensionMismatch("residual length does not match the matrix");
  CorrectionResult<TW> out;
  out.d.resize(f.n());
  const int budget = basissize > 0 ? basissize : f.krylov().basissize;
  const auto stats = gmres_correction_into(f, r.data(), out.d.data(), budget);
  out.iters = stats.iters;
  out.breakdown = stats.breakdown;
  return out;
}

template <typename TW, typename TF, typename TR>
CorrectionResult<TW> bicgstab_correction(MPFactorization<TW, TF, TR> &f,
                                         const std::vector<TW> &r, int budget = 0)
{
  if (static_cast<int>(r.size()) != f.n())
    throw DimensionMismatch("residual length does not match the matrix");
  CorrectionResult<TW> out;
  out.d.resize(f.n());
  const auto stats = bicgstab_correction_into(f, r.data(), out.d.data(),
                                              budget > 0 ? budget : f.krylov().basissize);
  out.iters = stats.iters;
  out.breakdown = stats.breakdown;
  return out;
}

// Iterative refinement with Krylov corrections: identical loop and
// termination rules to ir_solve_report, but each correction comes from the
// preconditioned iterative solver carried by the factorization, and khist
// records the inner iteration counts.
template <typename TW, typename TF, typename TR>
SolveReport<TW> krylov_ir_solve_report(MPFactorization<TW, TF, TR> &f,
                                       const std::vector<TW> &b, const TermParams &tp = {})
{
  if (f.krylov().kind == KrylovKind::None)
    throw InvalidConfig("factorization was built without a Krylov workspace");
  return detail::refine_loop(f, b, tp, [&](SolveReport<TW> &rep) {
    auto &r = f.residual_buf();
    auto &w = f.work_buf();
    const int n = f.n();
    for (int i = 0; i < n; ++i)
      w[i] = demote_val<TW>(r[i]);
    const KrylovStats stats =
        f.krylov().kind == KrylovKind::Gmres
            ? gmres_correction_into(f, w.data(), w.data(), f.krylov().basissize)
            : bicgstab_correction_into(f, w.data(), w.data(), f.krylov().basissize);
    rep.khist.push_back(stats.iters);
    rep.breakdown = rep.breakdown || stats.breakdown;
    auto &x = f.sol_buf();
    for (int i = 0; i < n; ++i)
      x[i] += promote_val<TR>(w[i]);
    return norm_inf(w);
  });
}

template <typename TW, typename TF, typename TR>
std::vector<TW> krylov_ir_solve(MPFactorization<TW, TF, TR> &f, const std::vector<TW> &b,
                                const TermParams &tp = {})
{
  return krylov_ir_solve_report(f, b, tp).sol;
}

// Uses the low precision factorization as a right preconditioner for a full
// (unrestarted) Krylov solve of A x = b, as a direct solver rather than a
// refinement step. Throws NotConverged, carrying the iterate, if the relative
// residual does not reach tol within maxiters iterations.
template <typename TW, typename TF, typename TR>
std::vector<TW> direct_precond_solve(MPFactorization<TW, TF, TR> &f,
                                     const std::vector<TW> &b,
                                     KrylovKind method = KrylovKind::Gmres,
                                     int maxiters = 100, double tol = 1e-10)
{
  const int n = f.n();
  if (static_cast<int>(b.size()) != n)
    throw DimensionMismatch("right-hand side length does not match the matrix");
  if (maxiters < 1)
    throw InvalidParameter("maxiters must be positive");
  if (!(tol > 0.0))
    throw InvalidParameter("tol must be positive");

  // Operator v -> A (P v); the preconditioned unknown z satisfies A P z = b
  // and x = P z.
  std::vector<TW> tmp(n);
  auto op = [&](const TW *vin, TW *vout) {
    std::copy(vin, vin + n, tmp.begin());
    detail::apply_precond(f, tmp.data());
    matvec_into(f.a_high(), tmp.data(), vout);
  };

  const double bnorm = static_cast<double>(detail::nrm2(b.data(), n));
  std::vector<TW> x(n, TW{});
  if (bnorm == 0.0)
    return x;
  const double target = tol * bnorm;

  if (method == KrylovKind::Gmres)
  {
    const int m = std::min(maxiters, n);
    std::vector<std::vector<TW>> basis(m + 1, std::vector<TW>(n));
    Matrix<TW> hess(m + 1, m);
    std::vector<TW> cs(m), sn(m), g(m + 1), y(m);
    std::copy(b.begin(), b.end(), basis[0].begin());
    const TW beta = detail::nrm2(basis[0].data(), n);
    for (int i = 0; i < n; ++i)
      basis[0][i] /= beta;
    g[0] = beta;
    int k = 0;
    double res = bnorm;
    for (int j = 0; j < m; ++j)
    {
      auto &w = basis[j + 1];
      op(basis[j].data(), w.data());
      for (int i = 0; i <= j; ++i)
      {
        const TW hij = detail::dot(w.data(), basis[i].data(), n);
        hess(i, j) = hij;
        const TW *vi = basis[i].data();
        for (int l = 0; l < n; ++l)
          w[l] -= hij * vi[l];
      }
      const TW hj1 = detail::nrm2(w.data(), n);
      hess(j + 1, j) = hj1;
      if (hj1 > TW{})
      {
        const TW inv = TW(1.0f) / hj1;
        for (int l = 0; l < n; ++l)
          w[l] *= inv;
      }
      for (int i = 0; i < j; ++i)
      {
        const TW t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
        hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = t;
      }
      const TW ha = hess(j, j), hb = hess(j + 1, j);
      const TW rr = std::hypot(ha, hb);
      cs[j] = rr == TW{} ? TW(1.0f) : ha / rr;
      sn[j] = rr == TW{} ? TW{} : hb / rr;
      hess(j, j) = cs[j] * ha + sn[j] * hb;
      hess(j + 1, j) = TW{};
      const TW gj = g[j];
      g[j] = cs[j] * gj;
      g[j + 1] = -sn[j] * gj;
      k = j + 1;
      res = std::fabs(static_cast<double>(g[j + 1]));
      if (res <= target || hj1 == TW{})
        break;
    }
    for (int i = k - 1; i >= 0; --i)
    {
      TW s = g[i];
      for (int l = i + 1; l < k; ++l)
        s -= hess(i, l) * y[l];
      y[i] = hess(i, i) == TW{} ? TW{} : s / hess(i, i);
    }
    std::vector<TW> z(n, TW{});
    for (int l = 0; l < k; ++l)
    {
      const TW yl = y[l];
      const TW *vl = basis[l].data();
      for (int i = 0; i < n; ++i)
        z[i] += yl * vl[i];
    }
    detail::apply_precond(f, z.data());
    if (res > target)
      throw NotConverged("preconditioned GMRES missed its tolerance", k, res / bnorm,
                         promote_vector<double>(z));
    return z;
  }

  // Stabilized bi-conjugate gradient on the same right-preconditioned
  // operator, then one preconditioner application recovers x.
  std::vector<TW> rr(b), rhat(b), p(b), v(n), s(n), t(n), z(n, TW{});
  TW rho = detail::dot(rhat.data(), rr.data(), n);
  int it = 0;
  double res = bnorm;
  auto finish = [&](double resn, int iters) -> std::vector<TW> {
    detail::apply_precond(f, z.data());
    if (resn > target)
      throw NotConverged("preconditioned bi-conjugate gradient missed its tolerance",
                         iters, resn / bnorm, promote_vector<double>(z));
    return z;
  };
  while (it < maxiters)
  {
    op(p.data(), v.data());
    const TW denom = detail::dot(rhat.data(), v.data(), n);
    if (denom == TW{})
      break;
    const TW alpha = rho / denom;
    for (int i = 0; i < n; ++i)
      s[i] = rr[i] - alpha * v[i];
    for (int i = 0; i < n; ++i)
      z[i] += alpha * p[i];
    ++it;
    res = static_cast<double>(detail::nrm2(s.data(), n));
    if (res <= target)
      return finish(res, it);
    op(s.data(), t.data());
    const TW tt = detail::dot(t.data(), t.data(), n);
    if (tt == TW{})
      break;
    const TW omega = detail::dot(t.data(), s.data(), n) / tt;
    for (int i = 0; i < n; ++i)
      z[i] += omega * s[i];
    for (int i = 0; i < n; ++i)
      rr[i] = s[i] - omega * t[i];
    res = static_cast<double>(detail::nrm2(rr.data(), n));
    if (res <= target)
      return finish(res, it);
    const TW rho_new = detail::dot(rhat.data(), rr.data(), n);
    if (rho_new == TW{} || omega == TW{})
      break;
    const TW beta = (rho_new / rho) * (alpha / omega);
    for (int i = 0; i < n; ++i)
      p[i] = rr[i] + beta * (p[i] - omega * v[i]);
    rho = rho_new;
  }
  return finish(res, it);
}

}  // namespace mpir

#endif  // MPIR_KRYLOV_IR_HPP
