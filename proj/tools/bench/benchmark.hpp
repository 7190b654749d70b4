/**
 * @file benchmark.hpp
 * @brief Contiguous pageMultiply against the nested baseline on 2x2 pages.
 */
#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "nrmimo/matrix_array.hpp"
#include "naive_matrix_array.hpp"

namespace nrmimo::bench {

struct BenchRow {
  std::size_t depth = 0;
  double contiguousMs = 0;
  double naiveMs = 0;
  double speedup = 0;  ///< naiveMs / contiguousMs
};

/// Integer-valued 2x2 pages, deterministic.
inline ComplexMatrixArray benchInput(std::size_t depth, int salt) {
  ComplexMatrixArray a(2, 2, depth);
  auto d = a.data();
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = cd(static_cast<double>((i * 7 + salt) % 11) - 5.0, static_cast<double>((i * 3 + 2 * salt) % 13) - 6.0);
  return a;
}

inline NaiveArray toNaive(const ComplexMatrixArray& a) {
  auto n = naiveMake(a.rows(), a.cols(), a.pages());
  for (std::size_t p = 0; p < a.pages(); ++p)
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) n[p][r][c] = a(r, c, p);
  return n;
}

inline BenchRow benchDepth(std::size_t depth, long reps) {
  using Clock = std::chrono::steady_clock;
  const auto a = benchInput(depth, 1), b = benchInput(depth, 2);
  const auto na = toNaive(a), nb = toNaive(b);
  volatile double sink = 0;

  ComplexMatrixArray c;
  auto t0 = Clock::now();
  for (long r = 0; r < reps; ++r) {
    c = pageMultiply(a, b);
    sink = sink + c(0, 0, depth - 1).real();
  }
  const double contiguous = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  NaiveArray nc;
  t0 = Clock::now();
  for (long r = 0; r < reps; ++r) {
    nc = naiveMultiply(na, nb);
    sink = sink + nc[depth - 1][0][0].real();
  }
  const double naive = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return {depth, contiguous, naive, contiguous > 0 ? naive / contiguous : 0.0};
}

inline std::vector<BenchRow> runBenchmark(const std::vector<std::size_t>& depths, long reps) {
  std::vector<BenchRow> rows;
  for (auto d : depths) rows.push_back(benchDepth(d, reps));
  return rows;
}

inline std::string benchCsv(const std::vector<BenchRow>& rows) {
  std::string s = "depth,contiguousMs,naiveMs,speedup\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.3f,%.3f,%.3f\n", r.depth, r.contiguousMs, r.naiveMs, r.speedup);
    s += buf;
  }
  return s;
}

}  // namespace nrmimo::bench
