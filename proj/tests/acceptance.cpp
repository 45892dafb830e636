// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: nine end-to-end checks, one PASS/FAIL line each, nonzero
// exit if any fails. Every tolerance is pinned here on purpose; loosening one
// is a semantic change to the contract, not a cleanup. Residual and error
// measurements use an independent compensated long double evaluation so a
// library bug cannot certify itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mpir/bench.hpp"
#include "mpir/greens.hpp"
#include "mpir/krylov_ir.hpp"
#include "mpir/mp_structures.hpp"
#include "support/condest.hpp"
#include "support/test_support.hpp"

using namespace mpir;
using namespace mpir::testing;

namespace
{

using acc_clock = std::chrono::steady_clock;

double seconds_since(acc_clock::time_point t0)
{
  return std::chrono::duration<double>(acc_clock::now() - t0).count();
}

std::string strf(const char *fmt, ...)
{
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

struct Outcome
{
  bool ok = false;
  std::string detail;
};

// ||b - A x||_inf evaluated in compensated long double, independent of the
// library's own residual path.
template <typename TW>
double residual_norm_oracle(const Matrix<TW> &a, const std::vector<double> &x,
                            const std::vector<TW> &b)
{
  const int n = a.rows();
  std::vector<long double> r(n), comp(n, 0.0L);
  for (int i = 0; i < n; ++i)
    r[i] = static_cast<long double>(b[i]);
  for (int j = 0; j < n; ++j)
  {
    const long double xj = x[j];
    const TW *c = a.col(j);
    for (int i = 0; i < n; ++i)
    {
      const long double p = -(static_cast<long double>(c[i]) * xj);
      long double t;
      comp[i] += detail::two_sum(r[i], p, t);
      r[i] = t;
    }
  }
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    m = std::max(m, std::fabs(static_cast<double>(r[i] + comp[i])));
  return m;
}

template <typename TF>
double factor_defect_ratio(const Matrix<double> &a64)
{
  Matrix<TF> a(a64.rows(), a64.cols());
  if constexpr (std::is_same_v<TF, double>)
    std::copy(a64.data(), a64.data() + a64.size(), a.data());
  else
    demote_matrix_into(a64, a);
  const auto f = lu_factor(a);
  const double u = machine_eps(precision_of_v<TF>);
  const double bound = 10.0 * a.rows() * u * matrix_inf_norm(a);
  return reconstruction_residual(f, a) / bound;
}

// 1. ||PA - LU||_inf <= 10 n u_TF ||A||_inf on random systems, every factor
// precision, under ten seconds.
Outcome check_factor_reconstruction()
{
  const auto t0 = acc_clock::now();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(2, 64);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial)
  {
    const auto a = random_matrix<double>(size(rng), rng);
    worst = std::max(worst, factor_defect_ratio<double>(a));
    worst = std::max(worst, factor_defect_ratio<float>(a));
    worst = std::max(worst, factor_defect_ratio<Half>(a));
  }
  const double t = seconds_since(t0);
  return {worst <= 1.0 && t < 10.0,
          strf("200 systems x 3 precisions, worst defect %.2f of bound", worst)};
}

// 2. Double working precision over single factors, in-place substitution:
// small residual in 6 +- 2 residual evaluations, residual and forward error
// at the working precision floor, under thirty seconds.
Outcome check_double_single_convergence()
{
  const auto t0 = acc_clock::now();
  const auto p = build_problem<double>(4096, 1.0, RhsKind::Manufactured);
  FactorOptions opts;
  opts.on_the_fly = false;
  auto f = mp_lu<double, float>(p.a, opts);
  const auto rep = ir_solve_report(f, p.b);
  const double u = machine_eps(Precision::B64);
  const double relres = residual_norm_oracle(p.a, rep.sol, p.b) / norm_inf(p.b);
  const double err = max_abs_diff(rep.sol, p.x_exact);
  const double t = seconds_since(t0);
  const bool ok = rep.reason == StopReason::SmallResidual && rep.rhist.size() >= 4 &&
                  rep.rhist.size() <= 8 && relres <= 10.0 * u && err <= 10.0 * u &&
                  t < 30.0;
  return {ok, strf("reason=%s evals=%zu relres=%.2e err=%.2e",
                   std::string(to_string(rep.reason)).c_str(), rep.rhist.size(), relres,
                   err)};
}

// 3. The in-place (scaled) and promoting substitution modes agree: both end
// with a small residual, forward errors within 4x, iteration counts within
// the [-1, 2] window on the ill-conditioned problem.
Outcome check_solve_mode_equivalence()
{
  const double u = machine_eps(Precision::B64);
  double worst_rel = 0.0, worst_ratio = 0.0;
  bool ok = true;
  for (double alpha : {1.0, 800.0})
    for (int n : {512, 1024})
    {
      const auto p = build_problem<double>(n, alpha, RhsKind::Manufactured);
      FactorOptions lo, mo;
      lo.on_the_fly = false;
      mo.on_the_fly = true;
      auto fl = mp_lu<double, float>(p.a, lo);
      auto fm = mp_lu<double, float>(p.a, mo);
      const auto rl = ir_solve_report(fl, p.b);
      const auto rm = ir_solve_report(fm, p.b);
      ok = ok && rl.reason == StopReason::SmallResidual &&
           rm.reason == StopReason::SmallResidual;
      const double rrl = rl.rhist.back() / rl.rhist.front();
      const double rrm = rm.rhist.back() / rm.rhist.front();
      worst_rel = std::max({worst_rel, rrl, rrm});
      const double el = std::max(max_abs_diff(rl.sol, p.x_exact), u);
      const double em = std::max(max_abs_diff(rm.sol, p.x_exact), u);
      worst_ratio = std::max(worst_ratio, std::max(el, em) / std::min(el, em));
      if (alpha == 800.0)
      {
        const auto diff = static_cast<long>(rl.rhist.size()) -
                          static_cast<long>(rm.rhist.size());
        ok = ok && diff >= -1 && diff <= 2;
      }
    }
  ok = ok && worst_rel <= 10.0 * u && worst_ratio <= 4.0;
  return {ok, strf("worst relres %.2e, worst error ratio %.2fx", worst_rel, worst_ratio)};
}

// 4. Half factors alone cannot solve the ill-conditioned single precision
// problem, but ten gmres vectors per correction against the same factors can.
Outcome check_half_failure_gmres_rescue()
{
  const auto t0 = acc_clock::now();
  const auto p = build_problem<float>(4096, 800.0, RhsKind::Manufactured);
  auto f = mp_glu<float, Half>(p.a, 10);
  const double bnorm = norm_inf(p.b);
  const auto plain = ir_solve_report(f, p.b);
  const double rel_plain =
      residual_norm_oracle(p.a, promote_vector<double>(plain.sol), p.b) / bnorm;
  const bool plain_failed = plain.reason != StopReason::SmallResidual &&
                            plain.reason != StopReason::SmallBackwardError &&
                            rel_plain > 1e-4;
  const auto rescued = krylov_ir_solve_report(f, p.b);
  const double rel_gmres =
      residual_norm_oracle(p.a, promote_vector<double>(rescued.sol), p.b) / bnorm;
  const double t = seconds_since(t0);
  return {plain_failed && rel_gmres <= 1e-4 && t < 180.0,
          strf("plain %s relres %.2e, gmres relres %.2e",
               std::string(to_string(plain.reason)).c_str(), rel_plain, rel_gmres)};
}

// 5. Double residuals over a single precision problem converge to the
// promoted problem's solution and stop on correction stagnation; half factors
// on the same problem fail outright.
Outcome check_extended_residual()
{
  const auto p = build_problem<float>(4096, 799.0, RhsKind::Integral);
  auto f = mp_lu<float, float, double>(p.a);
  const auto rep = ir_solve_report(f, p.b);

  const int n = p.n;
  Matrix<double> ad(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      ad(i, j) = static_cast<double>(p.a(i, j));
  std::vector<double> xp = promote_vector<double>(p.b);
  const auto lf = lu_factor(ad);
  solve_plain(lf, xp);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    err = std::max(err, std::fabs(static_cast<double>(rep.sol[i]) - xp[i]));

  auto fh = MPFactorization<float, Half, double>(p.a);
  const auto reph = ir_solve_report(fh, p.b);
  const bool half_failed = reph.reason != StopReason::SmallResidual &&
                           reph.reason != StopReason::SmallBackwardError &&
                           reph.rhist.back() > 1e-1;
  const bool ok =
      rep.reason == StopReason::CorrectionStagnation && err <= 1e-6 && half_failed;
  return {ok, strf("reason=%s err-vs-promoted %.2e, half factors %s final resid %.2e",
                   std::string(to_string(rep.reason)).c_str(), err,
                   std::string(to_string(reph.reason)).c_str(), reph.rhist.back())};
}

// 6. A tighter stagnation ratio only truncates: shared history prefix, at
// least one iteration saved, final residual in the same 2x band. Step ratios
// here are bimodal (~u_f*kappa while contracting, ~1 on the floor), so only a
// right hand side whose last contracting step lands in [0.1, 0.5) separates
// the two cutoffs; such draws are rare (~0.2%) and realization-sensitive, so
// scan fixed seeds for the first one that truncates and assert the contract
// on it. A dead rmax knob exhausts the scan and fails.
Outcome check_stagnation_cutoff()
{
  const int n = 512;
  const auto a = detail::build_operator(n, 799.0);
  auto f = mp_lu<double, float>(a);
  std::vector<double> b(n);
  for (unsigned seed = 1; seed <= 4000; ++seed)
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto &v : b)
      v = dist(rng);
    const auto loose = ir_solve_report(f, b, update_parms({}, {}, 0.5));
    const auto tight = ir_solve_report(f, b, update_parms({}, {}, 0.1));
    if (tight.rhist.size() >= loose.rhist.size())
      continue;
    bool prefix = true;
    for (std::size_t i = 0; i < tight.rhist.size(); ++i)
      prefix = prefix && loose.rhist[i] == tight.rhist[i];
    const double final_ratio = loose.rhist.back() / tight.rhist.back();
    const bool ok = loose.reason == StopReason::ResidualStagnation &&
                    tight.reason == StopReason::ResidualStagnation && prefix &&
                    final_ratio >= 0.5 && final_ratio <= 2.0;
    return {ok, strf("seed %u: histories %zu vs %zu, prefix %s, final ratio %.2f", seed,
                     loose.rhist.size(), tight.rhist.size(),
                     prefix ? "shared" : "DIVERGED", final_ratio)};
  }
  return {false, "no rhs in 4000 draws stopped earlier under the tighter cutoff"};
}

// 7. Report shape invariants on random well-conditioned systems, plain and
// gmres-corrected alike.
Outcome check_report_invariants()
{
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> size(8, 96);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial)
  {
    const int n = size(rng);
    const auto a = random_diag_dominant<double>(n, rng);
    const auto b = random_vector<double>(n, rng);
    SolveReport<double> rep;
    const int basissize = 5;
    if (trial % 2 == 0)
    {
      auto f = mp_lu<double, float>(a);
      rep = ir_solve_report(f, b);
      if (!rep.khist.empty())
        return {false, "plain refinement logged inner iterations"};
    }
    else
    {
      auto f = mp_glu<double, float>(a, basissize);
      rep = krylov_ir_solve_report(f, b);
      if (rep.khist.size() != rep.dhist.size())
        return {false, "inner iteration log out of step with corrections"};
    }
    if (rep.reason != StopReason::SmallResidual)
      return {false, strf("system %d ended %s", trial,
                          std::string(to_string(rep.reason)).c_str())};
    if (rep.rhist.size() != rep.dhist.size() + 1 || rep.rhist.size() < 2)
      return {false, strf("system %d history sizes %zu/%zu", trial, rep.rhist.size(),
                          rep.dhist.size())};
    if (rep.rhist.front() != norm_inf(b))
      return {false, strf("system %d rhist[0] != ||b||", trial)};
    for (int k : rep.khist)
      if (k < 0 || k > basissize)
        return {false, strf("system %d inner count %d exceeds basis", trial, k)};
    ++checked;
  }
  return {checked == 50, strf("%d systems, histories and inner counts consistent",
                              checked)};
}

// Power iteration with deflation; the kernel matrix is symmetric so the
// found eigenvectors stay orthogonal.
double next_eigenvalue(const Matrix<double> &g, std::vector<std::vector<double>> &found,
                       std::mt19937_64 &rng)
{
  const int n = g.rows();
  auto v = random_vector<double>(n, rng);
  std::vector<double> w(n);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it)
  {
    for (const auto &u : found)
    {
      double p = 0.0;
      for (int i = 0; i < n; ++i)
        p += u[i] * v[i];
      for (int i = 0; i < n; ++i)
        v[i] -= p * u[i];
    }
    matvec_into(g, v.data(), w.data());
    double nw = 0.0, vw = 0.0, vv = 0.0;
    for (int i = 0; i < n; ++i)
    {
      nw += w[i] * w[i];
      vw += v[i] * w[i];
      vv += v[i] * v[i];
    }
    lambda = vw / vv;
    const double inv = 1.0 / std::sqrt(nw);
    for (int i = 0; i < n; ++i)
      v[i] = w[i] * inv;
  }
  found.push_back(v);
  return lambda;
}

// 8. The discretized operator is faithful: leading eigenvalues match the
// continuous ones to 1%, and the shifted operator's condition estimate lands
// within 20% of the reference value.
Outcome check_operator_fidelity()
{
  const auto g = build_greens_matrix(512);
  std::mt19937_64 rng(7);
  std::vector<std::vector<double>> found;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double worst_eig = 0.0;
  for (int k = 1; k <= 3; ++k)
  {
    const double expect = 1.0 / (k * k * pi2);
    const double lambda = next_eigenvalue(g, found, rng);
    worst_eig = std::max(worst_eig, std::fabs(lambda - expect) / expect);
  }
  const double kappa = cond_inf_estimate(detail::build_operator(4096, 799.0));
  const double ref = 2.35899e5;
  const bool ok = worst_eig <= 0.01 && kappa >= 0.8 * ref && kappa <= 1.2 * ref;
  return {ok, strf("worst eigenvalue off by %.2e, cond estimate %.5e", worst_eig, kappa)};
}

// 9. Half precision factorization is slower than double at every size; the
// claim is the ratio, not any absolute time.
Outcome check_half_slower()
{
  const auto res = run_bench(BenchTable::Halftime, {64, 96, 128, 160}, 3);
  double min_ratio = 1e300;
  for (const auto &row : res.rows)
    min_ratio = std::min(min_ratio, row.values.back());
  return {min_ratio > 1.0, strf("min half/double factor time ratio %.2f", min_ratio)};
}

}  // namespace

int main()
{
  struct Entry
  {
    const char *name;
    Outcome (*fn)();
  };
  const Entry checks[] = {
      {"factor reconstruction across precisions", check_factor_reconstruction},
      {"double/single refinement at n=4096", check_double_single_convergence},
      {"substitution mode equivalence", check_solve_mode_equivalence},
      {"half-factor failure and gmres rescue", check_half_failure_gmres_rescue},
      {"extended-precision residual solve", check_extended_residual},
      {"stagnation cutoff honors rmax", check_stagnation_cutoff},
      {"report invariants on random systems", check_report_invariants},
      {"operator spectrum and conditioning", check_operator_fidelity},
      {"half factorization slower than double", check_half_slower},
  };
  bool all = true;
  int id = 0;
  for (const auto &c : checks)
  {
    ++id;
    Outcome o;
    const auto t0 = acc_clock::now();
    try
    {
      o = c.fn();
    }
    catch (const std::exception &ex)
    {
      o = {false, strf("unexpected error: %s", ex.what())};
    }
    std::printf("[%s] %d %s: %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", id, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all = all && o.ok;
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
