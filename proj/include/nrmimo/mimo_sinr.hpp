/**
 * @file mimo_sinr.hpp
 * @brief Noise-plus-interference covariance, interference whitening and the
 * MMSE-IRC per-stream SINR.
 *
 * All matrices are pages over RBs. A precoder set is ports x rank x nRb.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrmimo/matrix_array.hpp"

namespace nrmimo {

using CovarianceSet = ComplexMatrixArray;   ///< rxPorts x rxPorts x nRb
using IntfNormChannel = ComplexMatrixArray; ///< rxPorts x txPorts x nRb, whitened

/// Linear per-stream, per-RB SINR.
class SinrMatrix {
 public:
  SinrMatrix() = default;
  SinrMatrix(std::size_t rank, std::size_t nRb) : rank_(rank), nRb_(nRb), v_(rank * nRb, 0.0) {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t nRb() const noexcept { return nRb_; }
  double& operator()(std::size_t l, std::size_t rb) noexcept { return v_[rb * rank_ + l]; }
  double operator()(std::size_t l, std::size_t rb) const noexcept { return v_[rb * rank_ + l]; }
  /// RB-major linearization (all streams of RB 0, then RB 1, ...).
  const std::vector<double>& values() const noexcept { return v_; }
  std::vector<double>& values() noexcept { return v_; }

  friend bool operator==(const SinrMatrix&, const SinrMatrix&) = default;

 private:
  std::size_t rank_ = 0;
  std::size_t nRb_ = 0;
  std::vector<double> v_;
};

struct SignalChunk {
  SinrMatrix sinr;
  int durationSymbols = 14;
  CovarianceSet interferenceCov;
};

inline CovarianceSet noiseCovariance(double noisePowerPerRb, std::size_t rxPorts, std::size_t nRb) {
  if (!(noisePowerPerRb > 0.0)) throw std::invalid_argument("noiseCovariance: noise power must be > 0");
  auto c = identity(rxPorts, nRb);
  c *= noisePowerPerRb;
  return c;
}

/// (A + A^H) / 2 on every page.
inline void makeHermitian(ComplexMatrixArray& a) {
  for (std::size_t p = 0; p < a.pages(); ++p)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      a(c, c, p) = a(c, c, p).real();
      for (std::size_t r = c + 1; r < a.rows(); ++r) {
        const cd m = 0.5 * (a(r, c, p) + std::conj(a(c, r, p)));
        a(r, c, p) = m;
        a(c, r, p) = std::conj(m);
      }
    }
}

/// acc + (H P)(H P)^H per RB.
inline CovarianceSet addInterference(const CovarianceSet& acc, const ComplexMatrixArray& h,
                                     const ComplexMatrixArray& p) {
  if (acc.rows() != h.rows() || acc.cols() != h.rows() || acc.pages() != h.pages())
    throw DimensionError("addInterference: covariance does not match the channel");
  const auto hp = pageMultiply(h, p);
  auto out = acc + pageMultiply(hp, hermitian(hp));
  makeHermitian(out);
  return out;
}

/// L^-1 H with L L^H = W, per RB.
inline IntfNormChannel whitenChannel(const ComplexMatrixArray& h, const CovarianceSet& w) {
  if (w.rows() != h.rows() || w.pages() != h.pages())
    throw DimensionError("whitenChannel: covariance does not match the channel");
  return pageMultiply(invertLowerTriangular(choleskyLLT(w)), h);
}

/// Unbiased MMSE SINR from the Gram matrix G = (H^n P)^H (H^n P), r <= 4.
/// out[l] = 1 / E(l,l) - 1 with E = (I + G)^-1. `gram` is r x r column-major.
inline void sinrFromGram(std::size_t r, const cd* gram, double* out) noexcept {
  cd m[16], l[16], li[16];
  for (std::size_t i = 0; i < r * r; ++i) m[i] = gram[i];
  for (std::size_t i = 0; i < r; ++i) m[i * r + i] += 1.0;
  // I + G is HPD with eigenvalues >= 1, so these cannot fail
  kernel::cholesky(r, m, l, 0.0);
  kernel::invertLower(r, l, li);
  for (std::size_t c = 0; c < r; ++c) {
    double e = 0;
    for (std::size_t k = c; k < r; ++k) e += std::norm(li[c * r + k]);
    out[c] = std::max(0.0, 1.0 / e - 1.0);
  }
}

inline SinrMatrix computeSinr(const IntfNormChannel& hNorm, const ComplexMatrixArray& p) {
  const auto g = pageMultiply(hNorm, p);
  auto m = pageMultiply(hermitian(g), g);
  m += identity(p.cols(), p.pages());
  const auto e = invertHermitianPD(m);
  SinrMatrix s(p.cols(), p.pages());
  for (std::size_t rb = 0; rb < p.pages(); ++rb)
    for (std::size_t k = 0; k < p.cols(); ++k) s(k, rb) = std::max(0.0, 1.0 / e(k, k, rb).real() - 1.0);
  return s;
}

/// Sum of the diagonal of (HP)^H (HP) per RB: total received power over streams.
inline std::vector<double> sisoRxPsd(const ComplexMatrixArray& h, const ComplexMatrixArray& p) {
  const auto hp = pageMultiply(h, p);
  std::vector<double> psd(hp.pages());
  for (std::size_t rb = 0; rb < hp.pages(); ++rb) psd[rb] = frobeniusNorm2(hp, rb);
  return psd;
}

/// First `rank` identity columns scaled by 1/sqrt(rank), repeated on nRb pages.
inline ComplexMatrixArray dummyPrecoder(std::size_t ports, std::size_t rank, std::size_t nRb = 1) {
  if (rank < 1 || rank > ports)
    throw std::invalid_argument("dummyPrecoder: rank " + std::to_string(rank) + " with " +
                                std::to_string(ports) + " ports");
  ComplexMatrixArray w(ports, rank, nRb);
  const double s = 1.0 / std::sqrt(static_cast<double>(rank));
  for (std::size_t p = 0; p < nRb; ++p)
    for (std::size_t k = 0; k < rank; ++k) w(k, k, p) = s;
  return w;
}

/// Repeats a 1-page matrix on n pages.
inline ComplexMatrixArray tile(const ComplexMatrixArray& page, std::size_t n) {
  if (page.pages() != 1) throw DimensionError("tile: expected a single page");
  ComplexMatrixArray out(page.rows(), page.cols(), n);
  for (std::size_t p = 0; p < n; ++p) std::copy(page.page(0).begin(), page.page(0).end(), out.page(p).begin());
  return out;
}

}  // namespace nrmimo
