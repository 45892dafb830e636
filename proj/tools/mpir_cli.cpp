// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mpir/bench.hpp"
#include "mpir/errors.hpp"
#include "mpir/greens.hpp"
#include "mpir/runtime.hpp"

using nlohmann::json;

namespace
{

struct SolveArgs
{
  int n = 512;
  double alpha = 1.0;
  std::string tw = "b64";
  std::string tf;
  std::string tr;
  std::string method = "ir";
  std::string rhs = "manufactured";
  std::optional<bool> onthefly;
  bool residterm = true;
  double cr = 1.0;
  double ce = 1.0;
  double rmax = 0.5;
  int litmax = 10;
  int basissize = 10;
  int maxiters = 100;
  double tol = 1e-10;
  std::string out;
};

struct BenchArgs
{
  std::string table = "halftime";
  std::vector<int> sizes = {512, 1024};
  int samples = 5;
  std::string out;
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

json report_json(const std::string &reason, double sol_norm_err,
                 const std::vector<double> &rhist, const std::vector<double> &dhist,
                 const std::vector<int> &khist, double seconds)
{
  json j;
  j["sol_norm_err"] = sol_norm_err;
  j["rhist"] = rhist;
  j["dhist"] = dhist;
  j["khist"] = khist;
  j["reason"] = reason;
  j["seconds"] = seconds;
  return j;
}

void emit(const json &j, const std::string &out)
{
  if (out.empty())
  {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f)
    throw std::runtime_error("cannot open output file: " + out);
  f << j.dump(2) << "\n";
}

int run_solve(const SolveArgs &sa)
{
  using namespace mpir;

  const RhsKind kind = [&] {
    if (sa.rhs == "manufactured")
      return RhsKind::Manufactured;
    if (sa.rhs == "integral")
      return RhsKind::Integral;
    throw InvalidParameter("unknown right-hand side kind: " + sa.rhs);
  }();
  const auto p = build_problem<double>(sa.n, sa.alpha, kind);

  const Precision tw = parse_precision(sa.tw);
  const std::optional<Precision> tf =
      sa.tf.empty() ? std::nullopt : std::optional<Precision>(parse_precision(sa.tf));
  const std::optional<Precision> tr =
      sa.tr.empty() ? std::nullopt : std::optional<Precision>(parse_precision(sa.tr));
  const PrecisionConfig cfg = sa.method == "plain-lu"
                                  ? resolve_config(tw, tw, tw)
                                  : resolve_config(tw, tf, tr, sa.onthefly);

  const TermParams tp = update_parms(sa.cr, sa.ce, sa.rmax, sa.litmax);

  std::string reason;
  double err = 0.0, seconds = 0.0;
  std::vector<double> rhist, dhist;
  std::vector<int> khist;
  bool ok = false;

  if (sa.method == "plain-lu")
  {
    // One working-precision factor-and-solve, no refinement; reported with a
    // two-entry residual history for uniformity.
    const auto t0 = std::chrono::steady_clock::now();
    AnyFactorization f(p.a, cfg);
    TermParams one = tp;
    one.litmax = 1;
    one.rmax = 1.0;
    auto rep = f.solve(p.b, one);
    const auto t1 = std::chrono::steady_clock::now();
    seconds = std::chrono::duration<double>(t1 - t0).count();
    rhist = rep.rhist;
    dhist = rep.dhist;
    reason = "Solved";
    ok = true;
    for (int i = 0; i < sa.n; ++i)
      err = std::max(err, std::abs(rep.sol[i] - 1.0));
  }
  else if (sa.method == "direct-precond")
  {
    AnyFactorization f(p.a, cfg);
    try
    {
      const auto x = f.direct_solve(p.b, KrylovKind::Gmres, sa.maxiters, sa.tol, &seconds);
      reason = "Converged";
      ok = true;
      for (int i = 0; i < sa.n; ++i)
        err = std::max(err, std::abs(x[i] - 1.0));
    }
    catch (const NotConverged &e)
    {
      reason = "NotConverged";
      for (int i = 0; i < sa.n; ++i)
        err = std::max(err, std::abs(e.sol[i] - 1.0));
    }
  }
  else
  {
    const KrylovKind kk = sa.method == "ir"            ? KrylovKind::None
                          : sa.method == "gmres-ir"    ? KrylovKind::Gmres
                          : sa.method == "bicgstab-ir" ? KrylovKind::Bicgstab
                                                       : throw InvalidParameter(
                                                             "unknown method: " + sa.method);
    AnyFactorization f(p.a, cfg, sa.residterm, kk, sa.basissize);
    const auto rep = f.solve(p.b, tp);
    rhist = rep.rhist;
    dhist = rep.dhist;
    khist = rep.khist;
    seconds = rep.seconds;
    reason = to_string(rep.reason);
    ok = rep.reason == StopReason::SmallResidual ||
         rep.reason == StopReason::SmallBackwardError;
    for (int i = 0; i < sa.n; ++i)
      err = std::max(err, std::abs(rep.sol[i] - 1.0));
  }

  // One CSV summary row, then the JSON report.
  std::cout << "method,N,alpha,TW,TF,TR,iters,relres,sol_norm_err,reason,seconds\n"
            << sa.method << "," << sa.n << "," << fmt(sa.alpha) << "," << name(cfg.tw)
            << "," << name(cfg.tf) << "," << name(cfg.tr) << ","
            << (rhist.empty() ? 0 : static_cast<int>(rhist.size()) - 1) << ","
            << fmt(rhist.size() > 1 ? rhist.back() / rhist.front() : 0.0) << ","
            << fmt(err) << "," << reason << "," << fmt(seconds) << "\n";

  emit(report_json(reason, err, rhist, dhist, khist, seconds), sa.out);
  return ok ? 0 : 1;
}

int run_bench_cmd(const BenchArgs &ba)
{
  using namespace mpir;
  const BenchTable t = parse_table(ba.table);
  const BenchResult r = run_bench(t, ba.sizes, ba.samples);
  if (ba.out.empty())
  {
    write_csv(r, std::cout);
    return 0;
  }
  std::ofstream f(ba.out);
  if (!f)
    throw std::runtime_error("cannot open output file: " + ba.out);
  write_csv(r, f);
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"mixed-precision iterative refinement solver for the integral test operator"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto *solve = app.add_subcommand("solve", "factor once, then refine a solution");
  solve->add_option("--n", sa.n, "grid points")->check(CLI::Range(3, 1 << 20));
  solve->add_option("--alpha", sa.alpha, "operator shift: A = I - alpha*G");
  solve->add_option("--tw", sa.tw, "working precision (b64|b32)");
  solve->add_option("--tf", sa.tf, "factorization precision (b64|b32|b16)");
  solve->add_option("--tr", sa.tr, "residual precision (b64|b32)");
  solve->add_option("--method", sa.method,
                    "ir|gmres-ir|bicgstab-ir|direct-precond|plain-lu");
  solve->add_option("--rhs", sa.rhs, "manufactured|integral");
  solve->add_flag("--onthefly,!--no-onthefly",
                  [&sa](int64_t v) { sa.onthefly = v > 0; },
                  "promote factor entries during substitution");
  solve->add_flag("--residterm,!--no-residterm", sa.residterm,
                  "terminate on small residual rather than backward error");
  solve->add_option("--cr", sa.cr, "residual termination factor");
  solve->add_option("--ce", sa.ce, "backward error termination factor");
  solve->add_option("--rmax", sa.rmax, "stagnation ratio");
  solve->add_option("--litmax", sa.litmax, "residual history limit");
  solve->add_option("--basissize", sa.basissize, "Krylov basis budget per correction");
  solve->add_option("--maxiters", sa.maxiters, "direct-precond iteration cap");
  solve->add_option("--tol", sa.tol, "direct-precond residual tolerance");
  solve->add_option("--out", sa.out, "write the JSON report here");

  BenchArgs ba;
  auto *bench = app.add_subcommand("bench", "timing and accuracy tables as CSV");
  bench->add_option("--table", ba.table, "halftime|solvecomp|ip1|ip2|ip3");
  bench->add_option("--sizes", ba.sizes, "matrix sizes")->delimiter(',');
  bench->add_option("--samples", ba.samples, "timed repetitions per entry");
  bench->add_option("--out", ba.out, "write the CSV here");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (solve->parsed())
      return run_solve(sa);
    return run_bench_cmd(ba);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
