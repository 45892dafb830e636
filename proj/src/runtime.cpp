// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpir/runtime.hpp"

#include <chrono>

#include "mpir/krylov_ir.hpp"

namespace mpir
{

namespace
{

template <typename TW, typename TF, typename TR>
MPFactorization<TW, TF, TR> make_typed(const Matrix<double> &a, const PrecisionConfig &cfg,
                                       bool resid_term, KrylovKind kind, int basissize)
{
  FactorOptions opts;
  opts.resid_term = resid_term;
  opts.on_the_fly = cfg.on_the_fly;
  Matrix<TW> atw = [&] {
    if constexpr (std::is_same_v<TW, double>)
      return a;
    else
      return demote_matrix<TW>(a);
  }();
  return MPFactorization<TW, TF, TR>(std::move(atw), opts, kind,
                                     kind == KrylovKind::None ? 0 : basissize);
}

AnyFactorization::Storage make_storage(const Matrix<double> &a, const PrecisionConfig &cfg,
                                       bool resid_term, KrylovKind kind, int basissize)
{
  const bool ext = cfg.tr != cfg.tw;
  if (cfg.tw == Precision::B64)
  {
    switch (cfg.tf)
    {
      case Precision::B64:
        return make_typed<double, double, double>(a, cfg, resid_term, kind, basissize);
      case Precision::B32:
        return make_typed<double, float, double>(a, cfg, resid_term, kind, basissize);
      default:
        return make_typed<double, Half, double>(a, cfg, resid_term, kind, basissize);
    }
  }
  if (cfg.tf == Precision::B32)
    return ext ? AnyFactorization::Storage(make_typed<float, float, double>(a, cfg, resid_term, kind, basissize))
               : AnyFactorization::Storage(make_typed<float, float, float>(a, cfg, resid_term, kind, basissize));
  return ext ? AnyFactorization::Storage(make_typed<float, Half, double>(a, cfg, resid_term, kind, basissize))
             : AnyFactorization::Storage(make_typed<float, Half, float>(a, cfg, resid_term, kind, basissize));
}

template <typename TW>
std::vector<TW> to_working(const std::vector<double> &b)
{
  if constexpr (std::is_same_v<TW, double>)
    return b;
  else
    return demote_vector<TW>(b);
}

}  // namespace

AnyFactorization::AnyFactorization(const Matrix<double> &a, const PrecisionConfig &cfg,
                                   bool resid_term, KrylovKind kind, int basissize)
  : cfg_((cfg.validate(), cfg)), f_(make_storage(a, cfg, resid_term, kind, basissize))
{
}

int AnyFactorization::n() const
{
  return std::visit([](const auto &f) { return f.n(); }, f_);
}

RuntimeReport AnyFactorization::solve(const std::vector<double> &b, const TermParams &tp)
{
  return std::visit(
      [&](auto &f) {
        using FType = std::decay_t<decltype(f)>;
        using TW = typename FType::working_type;
        const auto btw = to_working<TW>(b);
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = f.krylov().kind == KrylovKind::None
                             ? ir_solve_report(f, btw, tp)
                             : krylov_ir_solve_report(f, btw, tp);
        const auto t1 = std::chrono::steady_clock::now();
        RuntimeReport out;
        out.sol = promote_vector<double>(rep.sol);
        out.rhist = rep.rhist;
        out.dhist = rep.dhist;
        out.khist = rep.khist;
        out.reason = rep.reason;
        out.breakdown = rep.breakdown;
        out.seconds = std::chrono::duration<double>(t1 - t0).count();
        return out;
      },
      f_);
}

std::vector<double> AnyFactorization::direct_solve(const std::vector<double> &b,
                                                   KrylovKind method, int maxiters,
                                                   double tol, double *seconds)
{
  return std::visit(
      [&](auto &f) {
        using FType = std::decay_t<decltype(f)>;
        using TW = typename FType::working_type;
        const auto btw = to_working<TW>(b);
        const auto t0 = std::chrono::steady_clock::now();
        const auto x = direct_precond_solve(f, btw, method, maxiters, tol);
        const auto t1 = std::chrono::steady_clock::now();
        if (seconds)
          *seconds = std::chrono::duration<double>(t1 - t0).count();
        return promote_vector<double>(x);
      },
      f_);
}

void AnyFactorization::refactor(const Matrix<double> &a)
{
  std::visit(
      [&](auto &f) {
        using FType = std::decay_t<decltype(f)>;
        using TW = typename FType::working_type;
        if constexpr (std::is_same_v<TW, double>)
          f.refactor(a);
        else
          f.refactor(demote_matrix<TW>(a));
      },
      f_);
}

}  // namespace mpir
