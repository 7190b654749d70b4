/**
 * @file matrix_array.hpp
 * @brief Contiguous 3D complex array treated as pages of equally sized
 * matrices, plus the page-wise kernels the MIMO chain needs.
 *
 * Layout: pages are stored back to back. Inside a page elements are
 * column-major, so element (r, c, p) lives at p*rows*cols + c*rows + r.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrmimo {

using cd = std::complex<double>;

/// Shape disagreement between operands, or bad construction arguments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky or triangular inversion hit a non-positive / zero pivot.
class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& what, std::size_t page)
      : std::runtime_error(what + " (page " + std::to_string(page) + ")"),
        page_(page) {}
  std::size_t page() const noexcept { return page_; }

 private:
  std::size_t page_;
};

class ComplexMatrixArray {
 public:
  ComplexMatrixArray() = default;

  ComplexMatrixArray(std::size_t rows, std::size_t cols, std::size_t pages = 1)
      : rows_(rows), cols_(cols), pages_(pages) {
    if (rows == 0 || cols == 0 || pages == 0) {
      throw DimensionError("ComplexMatrixArray: dimensions must be >= 1");
    }
    data_.assign(rows * cols * pages, cd{});
  }

  ComplexMatrixArray(std::size_t rows, std::size_t cols, std::size_t pages,
                     std::span<const cd> values)
      : ComplexMatrixArray(rows, cols, pages) {
    if (values.size() != data_.size()) {
      throw DimensionError("ComplexMatrixArray: expected " +
                           std::to_string(data_.size()) + " values, got " +
                           std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), data_.begin());
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t pages() const noexcept { return pages_; }
  std::size_t pageSize() const noexcept { return rows_ * cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::size_t r, std::size_t c, std::size_t p = 0) const noexcept {
    return p * rows_ * cols_ + c * rows_ + r;
  }

  cd& operator()(std::size_t r, std::size_t c, std::size_t p = 0) noexcept {
    return data_[index(r, c, p)];
  }
  const cd& operator()(std::size_t r, std::size_t c, std::size_t p = 0) const noexcept {
    return data_[index(r, c, p)];
  }

  std::span<cd> page(std::size_t p) noexcept {
    return {data_.data() + p * pageSize(), pageSize()};
  }
  std::span<const cd> page(std::size_t p) const noexcept {
    return {data_.data() + p * pageSize(), pageSize()};
  }

  std::span<cd> data() noexcept { return data_; }
  std::span<const cd> data() const noexcept { return data_; }

  /// Copy of a single page as a 1-page array.
  ComplexMatrixArray pageCopy(std::size_t p) const {
    return ComplexMatrixArray(rows_, cols_, 1, page(p));
  }

  bool sameShape(const ComplexMatrixArray& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_ && pages_ == o.pages_;
  }

  ComplexMatrixArray& operator+=(const ComplexMatrixArray& o) {
    if (!sameShape(o)) throw DimensionError("operator+=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrixArray& operator-=(const ComplexMatrixArray& o) {
    if (!sameShape(o)) throw DimensionError("operator-=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrixArray& operator*=(cd s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexMatrixArray operator+(ComplexMatrixArray a, const ComplexMatrixArray& b) {
    a += b;
    return a;
  }
  friend ComplexMatrixArray operator-(ComplexMatrixArray a, const ComplexMatrixArray& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrixArray operator*(ComplexMatrixArray a, cd s) {
    a *= s;
    return a;
  }
  friend ComplexMatrixArray operator*(cd s, ComplexMatrixArray a) {
    a *= s;
    return a;
  }

  friend bool operator==(const ComplexMatrixArray& a, const ComplexMatrixArray& b) {
    return a.sameShape(b) && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t pages_ = 0;
  std::vector<cd> data_;
};

inline ComplexMatrixArray make(std::size_t rows, std::size_t cols, std::size_t pages) {
  return ComplexMatrixArray(rows, cols, pages);
}

inline ComplexMatrixArray make(std::size_t rows, std::size_t cols, std::size_t pages,
                               std::span<const cd> values) {
  return ComplexMatrixArray(rows, cols, pages, values);
}

inline ComplexMatrixArray make(std::size_t rows, std::size_t cols, std::size_t pages,
                               std::initializer_list<cd> values) {
  return ComplexMatrixArray(rows, cols, pages,
                            std::span<const cd>(values.begin(), values.size()));
}

/// Identity pages.
inline ComplexMatrixArray identity(std::size_t n, std::size_t pages = 1) {
  ComplexMatrixArray out(n, n, pages);
  for (std::size_t p = 0; p < pages; ++p)
    for (std::size_t i = 0; i < n; ++i) out(i, i, p) = 1.0;
  return out;
}

namespace kernel {

// Raw column-major page kernels. Callers own the shapes.

/// out (m x n) = a (m x k) * b (k x n)
inline void gemm(std::size_t m, std::size_t k, std::size_t n, const cd* a,
                 const cd* b, cd* out) noexcept {
  for (std::size_t j = 0; j < n; ++j) {
    cd* oc = out + j * m;
    for (std::size_t i = 0; i < m; ++i) oc[i] = cd{};
    for (std::size_t l = 0; l < k; ++l) {
      const cd blj = b[j * k + l];
      const cd* al = a + l * m;
      for (std::size_t i = 0; i < m; ++i) oc[i] += al[i] * blj;
    }
  }
}

/// Lower Cholesky factor of an n x n Hermitian page. Returns false on a
/// pivot <= tol.
inline bool cholesky(std::size_t n, const cd* a, cd* l, double tol = 1e-14) noexcept {
  for (std::size_t i = 0; i < n * n; ++i) l[i] = cd{};
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[k * n + j]);
    if (!(d > tol)) return false;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cd s = a[j * n + i];
      for (std::size_t k = 0; k < j; ++k) s -= l[k * n + i] * std::conj(l[k * n + j]);
      l[j * n + i] = s / ljj;
    }
  }
  return true;
}

/// Inverse of a lower-triangular page by forward substitution.
inline bool invertLower(std::size_t n, const cd* l, cd* out) noexcept {
  for (std::size_t i = 0; i < n * n; ++i) out[i] = cd{};
  for (std::size_t j = 0; j < n; ++j) {
    if (l[j * n + j] == cd{}) return false;
    out[j * n + j] = 1.0 / l[j * n + j];
    for (std::size_t i = j + 1; i < n; ++i) {
      cd s{};
      for (std::size_t k = j; k < i; ++k) s += l[k * n + i] * out[j * n + k];
      out[j * n + i] = -s / l[i * n + i];
    }
  }
  return true;
}

}  // namespace kernel

/// Page-wise product. No broadcasting: page counts must match.
inline ComplexMatrixArray pageMultiply(const ComplexMatrixArray& a,
                                       const ComplexMatrixArray& b) {
  if (a.cols() != b.rows() || a.pages() != b.pages()) {
    throw DimensionError("pageMultiply: (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + "x" + std::to_string(a.pages()) +
                         ") * (" + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + "x" + std::to_string(b.pages()) + ")");
  }
  ComplexMatrixArray out(a.rows(), b.cols(), a.pages());
  for (std::size_t p = 0; p < a.pages(); ++p) {
    kernel::gemm(a.rows(), a.cols(), b.cols(), a.page(p).data(), b.page(p).data(),
                 out.page(p).data());
  }
  return out;
}

inline ComplexMatrixArray hermitian(const ComplexMatrixArray& a) {
  ComplexMatrixArray out(a.cols(), a.rows(), a.pages());
  for (std::size_t p = 0; p < a.pages(); ++p)
    for (std::size_t c = 0; c < a.cols(); ++c)
      for (std::size_t r = 0; r < a.rows(); ++r) out(c, r, p) = std::conj(a(r, c, p));
  return out;
}

/// Lower-triangular L per page with L * L^H == A. Only the lower triangle
/// of A is read.
inline ComplexMatrixArray choleskyLLT(const ComplexMatrixArray& a) {
  if (a.rows() != a.cols()) throw DimensionError("choleskyLLT: pages must be square");
  ComplexMatrixArray out(a.rows(), a.cols(), a.pages());
  for (std::size_t p = 0; p < a.pages(); ++p) {
    if (!kernel::cholesky(a.rows(), a.page(p).data(), out.page(p).data())) {
      throw DecompositionError("choleskyLLT: matrix is not positive definite", p);
    }
  }
  return out;
}

inline ComplexMatrixArray invertLowerTriangular(const ComplexMatrixArray& l) {
  if (l.rows() != l.cols()) throw DimensionError("invertLowerTriangular: pages must be square");
  ComplexMatrixArray out(l.rows(), l.cols(), l.pages());
  for (std::size_t p = 0; p < l.pages(); ++p) {
    if (!kernel::invertLower(l.rows(), l.page(p).data(), out.page(p).data())) {
      throw DecompositionError("invertLowerTriangular: zero diagonal entry", p);
    }
  }
  return out;
}

/// A^-1 = L^-H L^-1 for Hermitian positive definite pages.
inline ComplexMatrixArray invertHermitianPD(const ComplexMatrixArray& a) {
  const auto linv = invertLowerTriangular(choleskyLLT(a));
  auto out = pageMultiply(hermitian(linv), linv);
  // exact Hermitian symmetry
  for (std::size_t p = 0; p < out.pages(); ++p)
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(c, c, p) = out(c, c, p).real();
      for (std::size_t r = c + 1; r < out.rows(); ++r) out(c, r, p) = std::conj(out(r, c, p));
    }
  return out;
}

/// Squared Frobenius norm of one page.
inline double frobeniusNorm2(const ComplexMatrixArray& a, std::size_t p) {
  double s = 0;
  for (const auto& v : a.page(p)) s += std::norm(v);
  return s;
}

inline double frobeniusNorm2(const ComplexMatrixArray& a) {
  double s = 0;
  for (const auto& v : a.data()) s += std::norm(v);
  return s;
}

/// Largest |a - b| element-wise.
inline double maxAbsDiff(const ComplexMatrixArray& a, const ComplexMatrixArray& b) {
  if (!a.sameShape(b)) throw DimensionError("maxAbsDiff: shape mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline std::string formatComplex(cd v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g%c%.17gi", v.real(), std::signbit(v.imag()) ? '-' : '+',
                std::abs(v.imag()));
  return buf;
}

/// Debug dump: one block per page, one line per row, entries as a+bi with 17
/// significant digits, blank line between pages.
inline std::string dump(const ComplexMatrixArray& a) {
  std::ostringstream os;
  for (std::size_t p = 0; p < a.pages(); ++p) {
    if (p > 0) os << '\n';
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        if (c > 0) os << ' ';
        os << formatComplex(a(r, c, p));
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace nrmimo
