// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpir/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "mpir/dense_lu.hpp"
#include "mpir/errors.hpp"
#include "mpir/greens.hpp"
#include "mpir/ir_engine.hpp"
#include "mpir/mp_structures.hpp"

namespace mpir
{

namespace
{

// Keeps the optimizer from dropping timed kernels whose results go unused.
volatile double bench_sink = 0.0;

// Median of `samples` timed runs after one discarded warmup call.
double time_median(int samples, const std::function<void()> &fn)
{
  fn();
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i)
  {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    t[i] = std::chrono::duration<double>(t1 - t0).count();
  }
  std::sort(t.begin(), t.end());
  const int m = samples / 2;
  return samples % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
}

BenchRow halftime_row(int n, int samples)
{
  const Matrix<double> a = detail::build_operator(n, 800.0);
  const Matrix<float> a32 = demote_matrix<float>(a);
  const Matrix<Half> a16 = demote_matrix<Half>(a);
  const double t64 = time_median(samples, [&] { bench_sink = lu_factor(a).ipiv[0]; });
  const double t32 = time_median(samples, [&] { bench_sink = lu_factor(a32).ipiv[0]; });
  const double t16 = time_median(samples, [&] { bench_sink = lu_factor_half(a16).ipiv[0]; });
  return {n, {t64, t32, t16, t16 / t64}};
}

BenchRow solvecomp_row(int n, int samples)
{
  const auto p = build_problem<double>(n, 1.0, RhsKind::Manufactured);
  const double tlu = time_median(samples, [&] { bench_sink = lu_factor(p.a).ipiv[0]; });
  const auto f64 = lu_factor(p.a);
  std::vector<double> x(n);
  const double tts = time_median(samples, [&] {
    std::copy(p.b.begin(), p.b.end(), x.begin());
    solve_mps_into(f64, x.data());
    bench_sink = x[0];
  });
  const double tmplu =
      time_median(samples, [&] { bench_sink = mp_lu<double, float>(p.a).a_norm1(); });
  auto f = mp_lu<double, float>(p.a);
  const double tmps = time_median(samples, [&] { bench_sink = ir_solve(f, p.b)[0]; });
  const double topn = time_median(samples, [&] { bench_sink = matrix_one_norm(p.a); });
  return {n, {tlu, tts, tlu + tts, tmplu, tmps, tmplu + tmps, topn}};
}

BenchRow ip1_row(int n, int samples)
{
  const auto p = build_problem<double>(n, 800.0, RhsKind::Manufactured);
  const Matrix<float> a32 = demote_matrix<float>(p.a);
  std::vector<double> y(n);
  const double tmv = time_median(samples, [&] {
    matvec_into(p.a, p.x_exact.data(), y.data());
    bench_sink = y[0];
  });
  const double tlu32 = time_median(samples, [&] { bench_sink = lu_factor(a32).ipiv[0]; });

  const auto f64 = lu_factor(p.a);
  const auto f32 = lu_factor(a32);
  std::vector<double> x(n);
  std::vector<float> scratch(n);
  DemoteFlags flags;
  const double thps = time_median(samples, [&] {
    std::copy(p.b.begin(), p.b.end(), x.begin());
    solve_mps_into(f64, x.data());
    bench_sink = x[0];
  });
  const double tmps = time_median(samples, [&] {
    std::copy(p.b.begin(), p.b.end(), x.begin());
    solve_mps_into(f32, x.data());
    bench_sink = x[0];
  });
  const double tlps = time_median(samples, [&] {
    std::copy(p.b.begin(), p.b.end(), x.begin());
    solve_lps_into(f32, x.data(), scratch.data(), &flags);
    bench_sink = x[0];
  });
  return {n, {tmv, tlu32, thps, tmps, tlps, tlu32 / tmps}};
}

BenchRow ip_accuracy_row(int n, double alpha, int samples)
{
  const auto p = build_problem<double>(n, alpha, RhsKind::Manufactured);

  auto run = [&](bool on_the_fly) {
    FactorOptions opts;
    opts.on_the_fly = on_the_fly;
    auto f = mp_lu<double, float>(p.a, opts);
    const auto rep = ir_solve_report(f, p.b);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(rep.sol[i] - 1.0));
    const double res = rep.rhist.back() / rep.rhist.front();
    const double t = time_median(samples, [&] { bench_sink = ir_solve(f, p.b)[0]; });
    return std::array<double, 3>{err, res, t};
  };

  const auto lp = run(false);
  const auto mp = run(true);
  return {n, {lp[0], mp[0], lp[1], mp[1], lp[2], mp[2]}};
}

}  // namespace

BenchTable parse_table(const std::string &name)
{
  if (name == "halftime")
    return BenchTable::Halftime;
  if (name == "solvecomp")
    return BenchTable::Solvecomp;
  if (name == "ip1")
    return BenchTable::Ip1;
  if (name == "ip2")
    return BenchTable::Ip2;
  if (name == "ip3")
    return BenchTable::Ip3;
  throw UnknownTable("unknown bench table: " + name);
}

const char *table_name(BenchTable t)
{
  switch (t)
  {
    case BenchTable::Halftime: return "halftime";
    case BenchTable::Solvecomp: return "solvecomp";
    case BenchTable::Ip1: return "ip1";
    case BenchTable::Ip2: return "ip2";
    case BenchTable::Ip3: return "ip3";
  }
  return "?";
}

BenchResult run_bench(BenchTable t, const std::vector<int> &sizes, int samples)
{
  if (samples < 1)
    throw InvalidParameter("bench needs at least one sample");
  BenchResult out;
  switch (t)
  {
    case BenchTable::Halftime:
      out.header = {"N", "Double", "Single", "Half", "Ratio"};
      break;
    case BenchTable::Solvecomp:
      out.header = {"N", "LU", "TS", "TOTL", "MPLU", "MPS", "TOT", "OPNORM"};
      break;
    case BenchTable::Ip1:
      out.header = {"N", "MV64", "LU32", "HPS", "MPS", "LPS", "LU32/MPS"};
      break;
    case BenchTable::Ip2:
    case BenchTable::Ip3:
      out.header = {"N", "ELP", "EMP", "RLP", "RMP", "TLP", "TMP"};
      break;
  }
  for (int n : sizes)
  {
    switch (t)
    {
      case BenchTable::Halftime: out.rows.push_back(halftime_row(n, samples)); break;
      case BenchTable::Solvecomp: out.rows.push_back(solvecomp_row(n, samples)); break;
      case BenchTable::Ip1: out.rows.push_back(ip1_row(n, samples)); break;
      case BenchTable::Ip2: out.rows.push_back(ip_accuracy_row(n, 1.0, samples)); break;
      case BenchTable::Ip3: out.rows.push_back(ip_accuracy_row(n, 800.0, samples)); break;
    }
  }
  return out;
}

void write_csv(const BenchResult &r, std::ostream &out)
{
  for (size_t i = 0; i < r.header.size(); ++i)
    out << (i ? "," : "") << r.header[i];
  out << "\n";
  char buf[32];
  for (const auto &row : r.rows)
  {
    out << row.n;
    for (double v : row.values)
    {
      std::snprintf(buf, sizeof(buf), "%.5e", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

std::string to_csv(const BenchResult &r)
{
  std::ostringstream ss;
  write_csv(r, ss);
  return ss.str();
}

}  // namespace mpir
