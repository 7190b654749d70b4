/**
 * @file naive_matrix_array.hpp
 * @brief Benchmark baseline only: a 3D array held as a sequence of
 * separately allocated matrices, each a vector of row vectors.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace nrmimo::bench {

using cd = std::complex<double>;
using NaiveMatrix = std::vector<std::vector<cd>>;  // [row][col]
using NaiveArray = std::vector<NaiveMatrix>;        // [page]

inline NaiveArray naiveMake(std::size_t rows, std::size_t cols, std::size_t pages) {
  return NaiveArray(pages, NaiveMatrix(rows, std::vector<cd>(cols)));
}

/// Page-by-page product; every output matrix is built fresh.
inline NaiveArray naiveMultiply(const NaiveArray& a, const NaiveArray& b) {
  if (a.size() != b.size()) throw std::invalid_argument("naiveMultiply: page count mismatch");
  NaiveArray out;
  out.reserve(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    const auto& x = a[p];
    const auto& y = b[p];
    const std::size_t m = x.size(), k = y.size(), n = y.empty() ? 0 : y[0].size();
    if (!x.empty() && x[0].size() != k) throw std::invalid_argument("naiveMultiply: inner dimension mismatch");
    NaiveMatrix z(m, std::vector<cd>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        cd s{};
        for (std::size_t l = 0; l < k; ++l) s += x[i][l] * y[l][j];
        z[i][j] = s;
      }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace nrmimo::bench
