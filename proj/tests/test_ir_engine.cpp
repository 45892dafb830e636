// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "mpir/greens.hpp"
#include "mpir/ir_engine.hpp"
#include "mpir/mp_structures.hpp"
#include "support/test_support.hpp"

using namespace mpir;
using namespace mpir::testing;

namespace
{

// Independent high precision reference for b - A x.
template <typename TW, typename TX>
std::vector<long double> residual_oracle(const Matrix<TW> &a, const std::vector<TX> &x,
                                         const std::vector<TW> &b)
{
  const int n = a.rows();
  std::vector<long double> r(n);
  for (int i = 0; i < n; ++i)
  {
    long double s = static_cast<long double>(b[i]);
    for (int j = 0; j < n; ++j)
      s -= static_cast<long double>(a(i, j)) * static_cast<long double>(x[j]);
    r[i] = s;
  }
  return r;
}

std::vector<double> dense_solve(const Matrix<double> &a, const std::vector<double> &b)
{
  return solve_mps(lu_factor(a), b);
}

}  // namespace

TEST_CASE("termination parameter defaults and validation")
{
  const TermParams t = update_parms();
  CHECK(t.cr == 1.0);
  CHECK(t.ce == 1.0);
  CHECK(t.rmax == 0.5);
  CHECK(t.litmax == 10);

  const TermParams t2 = update_parms(2.0, 5.0, 0.25, 4);
  CHECK(t2.cr == 2.0);
  CHECK(t2.ce == 5.0);
  CHECK(t2.rmax == 0.25);
  CHECK(t2.litmax == 4);

  CHECK_THROWS_AS(update_parms(0.0), InvalidParameter);
  CHECK_THROWS_AS(update_parms(-1.0), InvalidParameter);
  CHECK_THROWS_AS(update_parms({}, 0.0), InvalidParameter);
  CHECK_THROWS_AS(update_parms({}, {}, 0.0), InvalidParameter);
  CHECK_THROWS_AS(update_parms({}, {}, 1.5), InvalidParameter);
  CHECK_THROWS_AS(update_parms({}, {}, {}, 0), InvalidParameter);
  CHECK_THROWS_AS(update_parms(std::nan("")), InvalidParameter);
  CHECK_NOTHROW(update_parms({}, {}, 1.0, 1));

  CHECK(to_string(StopReason::SmallResidual) == "SmallResidual");
  CHECK(to_string(StopReason::SmallBackwardError) == "SmallBackwardError");
  CHECK(to_string(StopReason::ResidualStagnation) == "ResidualStagnation");
  CHECK(to_string(StopReason::CorrectionStagnation) == "CorrectionStagnation");
  CHECK(to_string(StopReason::IterationLimit) == "IterationLimit");
}

TEST_CASE("promoted residual evaluation matches a long double oracle")
{
  std::mt19937_64 rng(1);
  const int n = 40;
  const auto a64 = random_matrix<double>(n, rng);
  const auto a32 = demote_matrix<float>(a64);

  auto f = mp_lu<float, Half, double>(a32);
  const auto x = random_vector<float>(n, rng);
  const auto b = random_vector<float>(n, rng);

  const auto r = residual_tr(f, x, b);
  static_assert(std::is_same_v<decltype(r)::value_type, double>);
  const auto oracle = residual_oracle(a32, x, b);
  for (int i = 0; i < n; ++i)
  {
    // The double evaluation of a float-exact expression is within a few
    // double ulps of the 80-bit reference.
    CHECK(std::fabs(static_cast<double>(oracle[i]) - r[i]) <=
          4 * n * machine_eps(Precision::B64) * (norm_inf(x) * matrix_inf_norm(a32)));
  }

  // Evaluating in the working precision instead loses the trailing digits.
  auto fw = mp_lu<float, Half>(a32);
  const auto rw = residual_tr(fw, x, b);
  static_assert(std::is_same_v<decltype(rw)::value_type, float>);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst,
                     std::fabs(static_cast<double>(oracle[i]) - static_cast<double>(rw[i])));
  CHECK(worst > 100 * machine_eps(Precision::B64) * norm_inf(x));

  CHECK_THROWS_AS(residual_tr(f, std::vector<float>(n - 1), b), DimensionMismatch);
}

TEST_CASE("identity system converges in one step")
{
  // Promoting solves leave the correction in the working precision, so the
  // identity is solved exactly. (The scaled in-place mode would round b/||b||
  // into the factor precision and need a second pass.)
  auto f = mp_lu<double, float>(Matrix<double>::identity(5), FactorOptions{true, true});
  const std::vector<double> b{1.0, -2.0, 3.0, -4.0, 5.0};
  const auto rep = ir_solve_report(f, b);

  CHECK(rep.reason == StopReason::SmallResidual);
  CHECK(rep.sol == b);
  REQUIRE(rep.rhist.size() == 2);
  REQUIRE(rep.dhist.size() == 1);
  CHECK(rep.rhist[0] == 5.0);
  CHECK(rep.rhist[1] == 0.0);
  CHECK(rep.dhist[0] == 5.0);
  CHECK(rep.khist.empty());
}

TEST_CASE("zero right-hand side returns a zero solution")
{
  auto f = mp_lu<double, float>(Matrix<double>::identity(4));
  const auto rep = ir_solve_report(f, std::vector<double>(4, 0.0));
  CHECK(rep.reason == StopReason::SmallResidual);
  CHECK(rep.sol == std::vector<double>(4, 0.0));
  CHECK(rep.rhist == std::vector<double>{0.0, 0.0});
}

TEST_CASE("report structure invariants hold across random systems")
{
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 25; ++trial)
  {
    std::uniform_int_distribution<int> size(3, 40);
    const int n = size(rng);
    const auto a = random_diag_dominant<double>(n, rng);
    const auto b = random_vector<double>(n, rng);
    const bool otf = trial % 2 == 0;

    auto f = mp_lu<double, float>(a, FactorOptions{true, otf});
    const auto rep = ir_solve_report(f, b);

    CHECK(rep.rhist.size() == rep.dhist.size() + 1);
    CHECK(rep.rhist.size() >= 2);
    CHECK(rep.rhist[0] == norm_inf(b));
    CHECK(rep.khist.empty());
    CHECK(rep.reason == StopReason::SmallResidual);
    CHECK(rep.rhist.back() <= machine_eps(Precision::B64) * norm_inf(b));
    for (double v : rep.rhist)
      CHECK(v >= 0.0);

    const auto xref = dense_solve(a, b);
    CHECK(max_abs_diff(rep.sol, xref) <= 1e-16 * 50 * n * norm_inf(xref) / 1e-2);

    // Same factorization solves again deterministically.
    const auto rep2 = ir_solve_report(f, b);
    CHECK(rep2.sol == rep.sol);
    CHECK(rep2.rhist == rep.rhist);
  }
}

TEST_CASE("backward error termination uses the composite test")
{
  std::mt19937_64 rng(9);
  const int n = 32;
  const auto a = random_diag_dominant<double>(n, rng);
  const auto b = random_vector<double>(n, rng);

  auto f = mp_lu<double, float>(a, FactorOptions{false, {}});
  CHECK(!f.resid_term());
  const auto rep = ir_solve_report(f, b);
  CHECK(rep.reason == StopReason::SmallBackwardError);
  CHECK(rep.rhist.back() <= machine_eps(Precision::B64) *
                                (norm_inf(b) + f.a_norm1() * norm_inf(rep.sol)));
}

TEST_CASE("iteration limit truncates the history")
{
  // Half factors of the resonant operator cannot push the residual to the
  // double precision floor, and with a generous rmax stagnation never fires.
  const auto p = build_problem<double>(128, 799.0, RhsKind::Manufactured);
  auto f = mp_lu<double, Half>(p.a);
  const auto rep = ir_solve_report(f, p.b, update_parms({}, {}, 1.0, 4));
  CHECK(rep.reason == StopReason::IterationLimit);
  CHECK(rep.rhist.size() == 4);
  CHECK(rep.dhist.size() == 3);
}

TEST_CASE("stalled refinement reports residual stagnation")
{
  const auto p = build_problem<float>(256, 800.0, RhsKind::Manufactured);
  auto f = mp_lu<float, Half>(p.a);
  const auto rep = ir_solve_report(f, p.b);
  CHECK(rep.reason == StopReason::ResidualStagnation);
  CHECK(rep.rhist.size() >= 2);
  CHECK(rep.rhist.size() < 10);
  // The run failed: the residual never came close to the working precision floor.
  CHECK(rep.rhist.back() > machine_eps(Precision::B32) * rep.rhist[0]);
}

TEST_CASE("a tighter stagnation threshold truncates the same trajectory")
{
  const auto p = build_problem<double>(192, 799.0, RhsKind::Manufactured);
  auto f = mp_lu<double, float>(p.a);

  const auto loose = ir_solve_report(f, p.b, update_parms({}, {}, 0.9, 20));
  const auto tight = ir_solve_report(f, p.b, update_parms({}, {}, 0.3, 20));
  CHECK(tight.rhist.size() <= loose.rhist.size());
  for (std::size_t i = 0; i < tight.rhist.size(); ++i)
    CHECK(tight.rhist[i] == loose.rhist[i]);
  for (std::size_t i = 0; i + 1 < tight.dhist.size(); ++i)
    CHECK(tight.dhist[i] == loose.dhist[i]);
}

TEST_CASE("extended residual precision ends on correction stagnation")
{
  const auto p = build_problem<float>(96, 1.0, RhsKind::Manufactured);
  auto f = mp_lu<float, float, double>(p.a);
  CHECK(f.on_the_fly());

  const auto rep = ir_solve_report(f, p.b, update_parms({}, {}, {}, 20));
  CHECK(rep.reason == StopReason::CorrectionStagnation);
  CHECK(rep.rhist.size() == rep.dhist.size() + 1);
  // The promoted residual bottoms out near the working precision floor, far
  // above the double floor but far below the initial residual.
  CHECK(rep.rhist.back() < 1e-5 * rep.rhist[0]);
  CHECK(rep.dhist.size() >= 2);
  CHECK(rep.dhist.back() >= 0.5 * rep.dhist[rep.dhist.size() - 2]);

  const auto xref = std::vector<float>(96, 1.0f);
  CHECK(max_abs_diff(rep.sol, xref) < 1e-4);
}

TEST_CASE("non-finite blow-ups carry the partial history")
{
  Matrix<double> a(1, 1);
  a(0, 0) = 1e-38;
  auto f = mp_lu<double, float>(a);
  try
  {
    ir_solve_report(f, std::vector<double>{1e308});
    FAIL("expected NonFiniteResult");
  }
  catch (const NonFiniteResult &e)
  {
    REQUIRE(e.rhist.size() == 1);
    CHECK(e.rhist[0] == 1e308);
    CHECK(e.dhist.empty());
  }

  CHECK_THROWS_AS(ir_solve_report(f, std::vector<double>{1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("solution-only entry point matches the reporting one")
{
  std::mt19937_64 rng(55);
  const auto a = random_diag_dominant<double>(24, rng);
  const auto b = random_vector<double>(24, rng);
  auto f = mp_lu<double, float>(a);
  const auto x1 = ir_solve(f, b);
  const auto rep = ir_solve_report(f, b);
  CHECK(x1 == rep.sol);
}
