// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mpir/bench.hpp"
#include "mpir/greens.hpp"
#include "mpir/runtime.hpp"

namespace py = pybind11;
using namespace mpir;

namespace
{

using farray = py::array_t<double, py::array::f_style | py::array::forcecast>;

Matrix<double> matrix_from(const farray &arr)
{
  if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
    throw InvalidParameter("expected a square 2-d array");
  const int n = static_cast<int>(arr.shape(0));
  Matrix<double> a(n, n);
  std::copy(arr.data(), arr.data() + a.size(), a.data());
  return a;
}

std::vector<double> vector_from(const py::array_t<double, py::array::forcecast> &arr,
                                int n)
{
  if (arr.ndim() != 1 || arr.shape(0) != n)
    throw InvalidParameter("right-hand side length does not match the matrix");
  const auto v = arr.unchecked<1>();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = v(i);
  return out;
}

py::array_t<double> array_from(const std::vector<double> &v)
{
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> array_from(const Matrix<double> &m)
{
  // Column-major strides, matching the native layout.
  py::array_t<double> out({m.rows(), m.cols()},
                          {sizeof(double), sizeof(double) * m.rows()});
  std::copy(m.data(), m.data() + m.size(), out.mutable_data());
  return out;
}

py::dict dict_from(const RuntimeReport &r)
{
  py::dict d;
  d["x"] = array_from(r.sol);
  d["rhist"] = r.rhist;
  d["dhist"] = r.dhist;
  d["khist"] = r.khist;
  d["reason"] = std::string(to_string(r.reason));
  d["breakdown"] = r.breakdown;
  d["seconds"] = r.seconds;
  return d;
}

std::optional<Precision> parse_opt(const std::optional<std::string> &s)
{
  if (!s)
    return {};
  return parse_precision(*s);
}

KrylovKind parse_krylov(const std::optional<std::string> &s)
{
  if (!s)
    return KrylovKind::None;
  if (*s == "gmres")
    return KrylovKind::Gmres;
  if (*s == "bicgstab")
    return KrylovKind::Bicgstab;
  throw InvalidParameter("krylov must be None, 'gmres' or 'bicgstab'");
}

RhsKind parse_rhs(const std::string &s)
{
  if (s == "manufactured")
    return RhsKind::Manufactured;
  if (s == "integral")
    return RhsKind::Integral;
  throw InvalidParameter("rhs kind must be 'manufactured' or 'integral'");
}

// Shared keyword handling for the factorization constructor and the one-shot
// solve below.
AnyFactorization make_factorization(const farray &a, const std::string &working,
                                    const std::optional<std::string> &factor,
                                    const std::optional<std::string> &residual,
                                    std::optional<bool> on_the_fly, bool resid_term,
                                    const std::optional<std::string> &krylov,
                                    int basissize)
{
  const PrecisionConfig cfg = resolve_config(parse_precision(working), parse_opt(factor),
                                             parse_opt(residual), on_the_fly);
  return AnyFactorization(matrix_from(a), cfg, resid_term, parse_krylov(krylov),
                          basissize);
}

TermParams make_parms(std::optional<double> cr, std::optional<double> ce,
                      std::optional<double> rmax, std::optional<int> litmax)
{
  return update_parms(cr, ce, rmax, litmax);
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Mixed precision iterative refinement: low precision LU factors "
            "refined to working precision accuracy.";

  py::register_exception<NotConverged>(m, "NotConverged", PyExc_RuntimeError);
  py::register_exception<SingularPivot>(m, "SingularPivot", PyExc_ArithmeticError);
  py::register_exception<NonFiniteResult>(m, "NonFiniteResult", PyExc_ArithmeticError);
  py::register_exception<OverflowDetected>(m, "OverflowDetected", PyExc_OverflowError);
  // Parameter and shape misuse maps to ValueError; the base Error stays a
  // RuntimeError via the default translator.
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  py::class_<AnyFactorization>(m, "Factorization",
                               "A matrix bound to its low precision LU factors plus the "
                               "workspace for refinement solves. Input arrays are taken "
                               "in float64 and rounded once into the working precision.")
      .def(py::init(&make_factorization), py::arg("a"), py::kw_only(),
           py::arg("working") = "double", py::arg("factor") = py::none(),
           py::arg("residual") = py::none(), py::arg("on_the_fly") = py::none(),
           py::arg("resid_term") = true, py::arg("krylov") = py::none(),
           py::arg("basissize") = 10)
      .def_property_readonly("n", &AnyFactorization::n)
      .def_property_readonly("working",
                             [](const AnyFactorization &f) {
                               return std::string(name(f.config().tw));
                             })
      .def_property_readonly("factor",
                             [](const AnyFactorization &f) {
                               return std::string(name(f.config().tf));
                             })
      .def_property_readonly("residual",
                             [](const AnyFactorization &f) {
                               return std::string(name(f.config().tr));
                             })
      .def_property_readonly("on_the_fly",
                             [](const AnyFactorization &f) {
                               return f.config().on_the_fly;
                             })
      .def(
          "solve",
          [](AnyFactorization &f, const py::array_t<double, py::array::forcecast> &b,
             std::optional<double> cr, std::optional<double> ce,
             std::optional<double> rmax, std::optional<int> litmax) {
            return dict_from(f.solve(vector_from(b, f.n()), make_parms(cr, ce, rmax, litmax)));
          },
          py::arg("b"), py::kw_only(), py::arg("cr") = py::none(),
          py::arg("ce") = py::none(), py::arg("rmax") = py::none(),
          py::arg("litmax") = py::none(),
          "Refine to working precision; returns a dict with the solution 'x', "
          "residual/correction histories, inner iteration counts, stop reason, "
          "and wall time.")
      .def(
          "direct_solve",
          [](AnyFactorization &f, const py::array_t<double, py::array::forcecast> &b,
             const std::string &method, int maxiters, double tol) {
            const KrylovKind k = method == "bicgstab" ? KrylovKind::Bicgstab
                                                      : KrylovKind::Gmres;
            if (method != "gmres" && method != "bicgstab")
              throw InvalidParameter("method must be 'gmres' or 'bicgstab'");
            return array_from(f.direct_solve(vector_from(b, f.n()), k, maxiters, tol));
          },
          py::arg("b"), py::kw_only(), py::arg("method") = "gmres",
          py::arg("maxiters") = 100, py::arg("tol") = 1e-10,
          "Use the factors as a right preconditioner for a full Krylov solve; "
          "raises NotConverged if tol is not reached.")
      .def(
          "refactor",
          [](AnyFactorization &f, const farray &a) { f.refactor(matrix_from(a)); },
          py::arg("a"), "Refactor a new matrix of the same size in place.");

  m.def(
      "solve",
      [](const farray &a, const py::array_t<double, py::array::forcecast> &b,
         const std::string &working, const std::optional<std::string> &factor,
         const std::optional<std::string> &residual, std::optional<bool> on_the_fly,
         bool resid_term, const std::optional<std::string> &krylov, int basissize,
         std::optional<double> cr, std::optional<double> ce, std::optional<double> rmax,
         std::optional<int> litmax) {
        auto f = make_factorization(a, working, factor, residual, on_the_fly, resid_term,
                                    krylov, basissize);
        return dict_from(f.solve(vector_from(b, f.n()), make_parms(cr, ce, rmax, litmax)));
      },
      py::arg("a"), py::arg("b"), py::kw_only(), py::arg("working") = "double",
      py::arg("factor") = py::none(), py::arg("residual") = py::none(),
      py::arg("on_the_fly") = py::none(), py::arg("resid_term") = true,
      py::arg("krylov") = py::none(), py::arg("basissize") = 10,
      py::arg("cr") = py::none(), py::arg("ce") = py::none(),
      py::arg("rmax") = py::none(), py::arg("litmax") = py::none(),
      "Factor once and refine: solve(a, b, factor='single') rounds a into the "
      "working precision, factors in the (lower) factor precision, and refines "
      "the solution back to working accuracy.");

  m.def(
      "greens_matrix", [](int n) { return array_from(build_greens_matrix(n)); },
      py::arg("n"),
      "Composite midpoint discretization of the -u'' Green's function kernel "
      "on (0, 1), dense n x n.");

  m.def(
      "build_operator",
      [](int n, double alpha) { return array_from(detail::build_operator(n, alpha)); },
      py::arg("n"), py::arg("alpha"),
      "I - alpha*G for the Green's kernel G; nearly singular when alpha "
      "approaches (k*pi)^2 for an integer k, e.g. (9*pi)^2 ~ 799.4.");

  m.def(
      "greens_problem",
      [](int n, double alpha, const std::string &rhs) {
        const auto p = build_problem<double>(n, alpha, parse_rhs(rhs));
        py::dict d;
        d["a"] = array_from(p.a);
        d["b"] = array_from(p.b);
        if (!p.x_exact.empty())
          d["x_exact"] = array_from(p.x_exact);
        return d;
      },
      py::arg("n"), py::arg("alpha"), py::arg("rhs") = "manufactured",
      "The integral equation test problem: dict with 'a', 'b', and for the "
      "manufactured rhs the exact solution 'x_exact' (all ones).");

  m.def(
      "bench",
      [](const std::string &table, const std::vector<int> &sizes, int samples) {
        const BenchResult r = run_bench(parse_table(table), sizes, samples);
        py::dict d;
        d["header"] = r.header;
        py::list rows;
        for (const auto &row : r.rows)
        {
          py::list vals;
          vals.append(row.n);
          for (double v : row.values)
            vals.append(v);
          rows.append(vals);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("table"), py::arg("sizes"), py::arg("samples") = 5,
      "Run one timing/accuracy table ('halftime', 'solvecomp', 'ip1', 'ip2', "
      "'ip3') over the given sizes; returns {'header': [...], 'rows': [[n, "
      "...], ...]}.");

  m.def(
      "bench_csv",
      [](const std::string &table, const std::vector<int> &sizes, int samples) {
        return to_csv(run_bench(parse_table(table), sizes, samples));
      },
      py::arg("table"), py::arg("sizes"), py::arg("samples") = 5,
      "Same as bench() but rendered as the CSV the command line tool writes.");

  m.def(
      "machine_eps",
      [](const std::string &p) { return machine_eps(parse_precision(p)); },
      py::arg("precision"), "Gap between 1 and the next float, 2^(1-p).");
  m.def(
      "unit_roundoff",
      [](const std::string &p) { return unit_roundoff(parse_precision(p)); },
      py::arg("precision"), "Half the machine epsilon, 2^-p.");

  m.attr("__version__") = "0.1.0";
}
