// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_BENCH_HPP
#define MPIR_BENCH_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mpir
{

enum class BenchTable
{
  Halftime,   // LU wall-clock by factorization precision, alpha = 800
  Solvecomp,  // plain vs mixed precision factor/solve split, alpha = 1
  Ip1,        // matvec and triangular-solve costs vs a single LU, alpha = 800
  Ip2,        // accuracy and total time of the two solve modes, alpha = 1
  Ip3         // same as Ip2 on the ill-conditioned operator, alpha = 800
};

BenchTable parse_table(const std::string &name);
const char *table_name(BenchTable t);

struct BenchRow
{
  int n = 0;
  std::vector<double> values;
};

struct BenchResult
{
  std::vector<std::string> header;  // leading "N", then the value columns
  std::vector<BenchRow> rows;
};

// Runs the requested table over the given sizes. Each timing is the median
// of `samples` runs taken after one discarded warmup; accuracy columns are
// computed once. Timings are wall-clock seconds and hardware-dependent.
BenchResult run_bench(BenchTable t, const std::vector<int> &sizes, int samples = 5);

// Comma-separated, header row first, N as an integer, values as %.5e.
void write_csv(const BenchResult &r, std::ostream &out);
std::string to_csv(const BenchResult &r);

}  // namespace mpir

#endif  // MPIR_BENCH_HPP
