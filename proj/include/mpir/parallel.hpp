// Copyright (c) 2026 mpir contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPIR_PARALLEL_HPP
#define MPIR_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mpir::detail
{

// Worker cap: hardware concurrency, overridable with the MPIR_THREADS
// environment variable (values < 1 are treated as 1).
inline int max_workers()
{
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1)
    n = 1;
  if (const char *env = std::getenv("MPIR_THREADS"))
  {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env)
      n = static_cast<int>(std::max(1L, std::min(v, 1024L)));
  }
  return n;
}

// Runs fn(b) for b in [0, nblocks). Blocks are independent, so the assignment
// of blocks to workers cannot change results, only timing.
template <typename F>
void parallel_blocks(int nblocks, int workers, F &&fn)
{
  if (workers <= 1 || nblocks <= 1)
  {
    for (int b = 0; b < nblocks; ++b)
      fn(b);
    return;
  }
  const int nw = std::min(workers, nblocks);
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  auto run = [&](int first) {
    for (int b = first; b < nblocks; b += nw)
      fn(b);
  };
  for (int t = 1; t < nw; ++t)
    pool.emplace_back(run, t);
  run(0);
  for (auto &th : pool)
    th.join();
}

}  // namespace mpir::detail

#endif  // MPIR_PARALLEL_HPP
