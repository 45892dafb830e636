// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_RUNTIME_HPP
#define MPIR_RUNTIME_HPP

#include <variant>
#include <vector>

#include "mpir/ir_engine.hpp"
#include "mpir/matrix.hpp"
#include "mpir/mp_structures.hpp"

namespace mpir
{

// A solve report with everything promoted to double for transport across the
// CLI and language bindings; promotion from any working precision is exact.
struct RuntimeReport
{
  std::vector<double> sol;
  std::vector<double> rhist;
  std::vector<double> dhist;
  std::vector<int> khist;
  StopReason reason = StopReason::IterationLimit;
  bool breakdown = false;
  double seconds = 0.0;
};

// Type-erased factorization covering every supported precision combination:
// working B64 with factors down to B16, and working B32 with factors down to
// B16 and optional B64 residuals. Input data arrives in double and is rounded
// once into the working precision.
class AnyFactorization
{
public:
  using Storage = std::variant<MPFactorization<double, double, double>,
                               MPFactorization<double, float, double>,
                               MPFactorization<double, Half, double>,
                               MPFactorization<float, float, float>,
                               MPFactorization<float, Half, float>,
                               MPFactorization<float, float, double>,
                               MPFactorization<float, Half, double>>;

  AnyFactorization(const Matrix<double> &a, const PrecisionConfig &cfg,
                   bool resid_term = true, KrylovKind kind = KrylovKind::None,
                   int basissize = 10);

  int n() const;
  const PrecisionConfig &config() const { return cfg_; }

  // Iterative refinement (plain or Krylov, fixed at construction).
  RuntimeReport solve(const std::vector<double> &b, const TermParams &tp = {});

  // Right-preconditioned direct solve; throws NotConverged like the typed
  // call. seconds, when non-null, receives the wall-clock time.
  std::vector<double> direct_solve(const std::vector<double> &b,
                                   KrylovKind method = KrylovKind::Gmres,
                                   int maxiters = 100, double tol = 1e-10,
                                   double *seconds = nullptr);

  // Reuse the allocation for a new matrix of the same size.
  void refactor(const Matrix<double> &a);

private:
  PrecisionConfig cfg_;
  Storage f_;
};

}  // namespace mpir

#endif  // MPIR_RUNTIME_HPP
