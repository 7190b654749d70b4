/**
 * @file codebook.hpp
 * @brief Type-I precoding codebooks (two-port table and single-panel up to
 * 32 ports, ranks 1-4, codebook mode 1).
 *
 * Precoders are generated on demand from (i1, i2). The composite wideband
 * index packs the 3GPP i1 vector as i1 = i11 + numI11 * (i12 + numI12 * i13).
 *
 * Besides the explicit matrix, every codebook exposes a structured form used
 * by the PMI search: a table of distinct beam vectors, and per (i1, i2) the
 * beam used by each column plus one coefficient per port block. Column k of
 * the precoder is then scale * [coef[k][0] * beam; coef[k][1] * beam; ...].
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrmimo/antenna.hpp"
#include "nrmimo/codebook_tables.hpp"
#include "nrmimo/matrix_array.hpp"

namespace nrmimo {

class CodebookError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxRank = 4;
inline constexpr int kMaxBlocks = 4;

struct CodebookParams {
  int n1 = 1;  ///< horizontal ports per polarization
  int n2 = 1;  ///< vertical ports per polarization
  int o1 = 4;
  int o2 = 1;
  int numPorts = 2;
  int rank = 1;
  int codebookMode = 1;

  /// Single-panel params with the standard oversampling.
  static CodebookParams singlePanel(int n1, int n2, int rank) {
    const auto [o1, o2] = tables::defaultOversampling(n1, n2);
    return {n1, n2, o1, o2, 2 * n1 * n2, rank, 1};
  }
};

struct PrecoderStructure {
  double scale = 1.0;
  int numCols = 1;
  std::array<int, kMaxRank> beam{};
  std::array<std::array<cd, kMaxBlocks>, kMaxRank> coef{};
};

class Codebook {
 public:
  virtual ~Codebook() = default;

  virtual int numPorts() const = 0;
  virtual int rank() const = 0;
  virtual int numI1() const = 0;
  virtual int numI2() const = 0;

  /// numPorts x rank precoder for (i1, i2). Throws CodebookError when out of range.
  virtual ComplexMatrixArray precoderAt(int i1, int i2) const = 0;

  virtual int numBlocks() const = 0;
  virtual int beamLength() const = 0;
  virtual int numBeams() const = 0;
  virtual const std::vector<cd>& beam(int b) const = 0;
  virtual PrecoderStructure structure(int i1, int i2) const = 0;

 protected:
  void checkIndex(int i1, int i2) const {
    if (i1 < 0 || i1 >= numI1() || i2 < 0 || i2 >= numI2()) {
      throw CodebookError("codebook index (" + std::to_string(i1) + "," + std::to_string(i2) +
                          ") out of range [" + std::to_string(numI1()) + "," +
                          std::to_string(numI2()) + ")");
    }
  }
};

/// Expands a structured precoder into its matrix.
inline ComplexMatrixArray expandStructure(const Codebook& cb, const PrecoderStructure& s) {
  ComplexMatrixArray w(cb.numPorts(), s.numCols);
  const int len = cb.beamLength();
  for (int k = 0; k < s.numCols; ++k) {
    const auto& v = cb.beam(s.beam[k]);
    for (int b = 0; b < cb.numBlocks(); ++b)
      for (int i = 0; i < len; ++i) w(b * len + i, k) = s.scale * s.coef[k][b] * v[i];
  }
  return w;
}

// phi_n = e^{j pi n / 2}, exact
inline cd cophase(int n) {
  static constexpr std::array<cd, 4> kPhi = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return kPhi[((n % 4) + 4) % 4];
}
inline cd interPanelPhase(int p) { return std::polar(1.0, std::numbers::pi * p / 4.0); }  // theta_p

inline std::vector<cd> kronecker(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

/// v_{l,m} (tilde = false) or v~_{l,m} (tilde = true): horizontal DFT vector
/// (x) vertical DFT vector. The tilde variant spans N1/2 horizontal ports with
/// doubled phase steps, so l < N1*O1/2.
inline std::vector<cd> dftBeam(const CodebookParams& p, int l, int m, bool tilde) {
  const int lMax = tilde ? p.n1 * p.o1 / 2 : p.n1 * p.o1;
  if (l < 0 || l >= lMax || m < 0 || m >= p.n2 * p.o2)
    throw CodebookError("dftBeam: index (" + std::to_string(l) + "," + std::to_string(m) +
                        ") out of range");
  if (tilde && p.n1 % 2 != 0) throw CodebookError("dftBeam: tilde beam needs even N1");
  const double twoPi = 2.0 * std::numbers::pi;
  std::vector<cd> u(p.n2);
  for (int k = 0; k < p.n2; ++k) u[k] = std::polar(1.0, twoPi * m * k / (p.o2 * p.n2));
  const int hCount = tilde ? p.n1 / 2 : p.n1;
  const double step = tilde ? 2.0 : 1.0;
  std::vector<cd> h(hCount);
  for (int k = 0; k < hCount; ++k) h[k] = std::polar(1.0, step * twoPi * l * k / (p.o1 * p.n1));
  return kronecker(h, u);
}

struct I1Components {
  int i11 = 0, i12 = 0, i13 = 0;
  friend bool operator==(const I1Components&, const I1Components&) = default;
};

inline int packI1(int i11, int i12, int i13, int numI11, int numI12) {
  if (i11 < 0 || i11 >= numI11 || i12 < 0 || i12 >= numI12 || i13 < 0)
    throw CodebookError("packI1: component out of range");
  return i11 + numI11 * (i12 + numI12 * i13);
}

inline I1Components unpackI1(int i1, int numI11, int numI12) {
  if (i1 < 0 || numI11 < 1 || numI12 < 1) throw CodebookError("unpackI1: bad arguments");
  return {i1 % numI11, (i1 / numI11) % numI12, i1 / (numI11 * numI12)};
}

/// Table 5.2.2.2.1-1: one or two ports, all variation in i2.
class TwoPortCodebook final : public Codebook {
 public:
  TwoPortCodebook(int numPorts, int rank) : ports_(numPorts), rank_(rank) {
    if (numPorts < 1 || numPorts > 2) throw CodebookError("two-port codebook: 1 or 2 ports");
    if (rank < 1 || rank > numPorts)
      throw CodebookError("two-port codebook: rank " + std::to_string(rank) + " exceeds " +
                          std::to_string(numPorts) + " ports");
  }

  int numPorts() const override { return ports_; }
  int rank() const override { return rank_; }
  int numI1() const override { return 1; }
  int numI2() const override {
    if (ports_ == 1) return 1;
    return rank_ == 1 ? tables::kTwoPortRank1Count : tables::kTwoPortRank2Count;
  }

  ComplexMatrixArray precoderAt(int i1, int i2) const override {
    checkIndex(i1, i2);
    if (ports_ == 1) return make(1, 1, 1, {1.0});
    const cd phi = cophase(i2);
    const double s2 = 1.0 / std::sqrt(2.0);
    if (rank_ == 1) return make(2, 1, 1, {s2, s2 * phi});
    // column-major: [[1, 1], [phi, -phi]] / 2
    return make(2, 2, 1, {0.5, 0.5 * phi, 0.5, -0.5 * phi});
  }

  int numBlocks() const override { return ports_; }
  int beamLength() const override { return 1; }
  int numBeams() const override { return 1; }
  const std::vector<cd>& beam(int) const override { return unit_; }

  PrecoderStructure structure(int i1, int i2) const override {
    checkIndex(i1, i2);
    PrecoderStructure s;
    s.numCols = rank_;
    if (ports_ == 1) {
      s.coef[0][0] = 1.0;
      return s;
    }
    const cd phi = cophase(i2);
    s.scale = rank_ == 1 ? 1.0 / std::sqrt(2.0) : 0.5;
    s.coef[0] = {1.0, phi};
    if (rank_ == 2) s.coef[1] = {1.0, -phi};
    return s;
  }

 private:
  int ports_;
  int rank_;
  std::vector<cd> unit_{1.0};
};

/// Type-I single-panel codebook, codebook mode 1, 4 to 32 ports.
class TypeOneSpCodebook final : public Codebook {
 public:
  explicit TypeOneSpCodebook(const CodebookParams& p) : p_(p) {
    if (p.codebookMode != 1) throw CodebookError("unsupported: codebook mode " + std::to_string(p.codebookMode));
    if (p.rank < 1 || p.rank > kMaxRank)
      throw CodebookError("unsupported: rank " + std::to_string(p.rank) + " (ranks 1-4 only)");
    if (p.numPorts != 2 * p.n1 * p.n2 || p.numPorts < 4)
      throw CodebookError("single-panel codebook: numPorts must be 2*n1*n2 >= 4");
    if (!isSupportedPortLayout(p.n1, p.n2))
      throw CodebookError("unsupported (n1,n2) = (" + std::to_string(p.n1) + "," + std::to_string(p.n2) + ")");
    if (p.rank > p.numPorts) throw CodebookError("rank exceeds port count");

    tilde_ = p.rank >= 3 && p.numPorts >= 16;
    numI12_ = p.n2 * p.o2;
    if (tilde_) {
      numI11_ = p.n1 * p.o1 / 2;
      numI13_ = 4;
      numI2_ = 2;
    } else {
      numI11_ = p.n1 * p.o1;
      if (p.rank == 1) {
        numI13_ = 1;
        numI2_ = 4;
      } else {
        offsets_ = p.rank == 2 ? tables::rank2Offsets(p.n1, p.n2) : tables::rank34Offsets(p.n1, p.n2);
        if (offsets_.empty()) throw CodebookError("no (k1,k2) table for this layout");
        numI13_ = static_cast<int>(offsets_.size());
        numI2_ = 2;
      }
    }
    for (int l = 0; l < numI11_; ++l)
      for (int m = 0; m < numI12_; ++m) beams_.push_back(dftBeam(p_, l, m, tilde_));
  }

  const CodebookParams& params() const { return p_; }
  int numPorts() const override { return p_.numPorts; }
  int rank() const override { return p_.rank; }
  int numI11() const { return numI11_; }
  int numI12() const { return numI12_; }
  int numI13() const { return numI13_; }
  int numI1() const override { return numI11_ * numI12_ * numI13_; }
  int numI2() const override { return numI2_; }

  ComplexMatrixArray precoderAt(int i1, int i2) const override {
    checkIndex(i1, i2);
    const auto [i11, i12, i13] = unpackI1(i1, numI11_, numI12_);
    const int P = p_.numPorts;
    const int r = p_.rank;
    const double scale = 1.0 / std::sqrt(static_cast<double>(r * P));
    const cd phi = cophase(i2);
    ComplexMatrixArray w(P, r);

    // Stack the given column blocks into column k.
    auto put = [&](int k, std::initializer_list<std::vector<cd>> blocks) {
      int row = 0;
      for (const auto& blk : blocks)
        for (const auto& v : blk) w(row++, k) = scale * v;
    };
    auto times = [](cd c, std::vector<cd> v) {
      for (auto& x : v) x *= c;
      return v;
    };

    if (tilde_) {
      const auto vt = dftBeam(p_, i11, i12, true);
      const cd theta = interPanelPhase(i13);
      put(0, {vt, times(theta, vt), times(phi, vt), times(phi * theta, vt)});
      put(1, {vt, times(-theta, vt), times(phi, vt), times(-phi * theta, vt)});
      put(2, {vt, times(theta, vt), times(-phi, vt), times(-phi * theta, vt)});
      if (r == 4) put(3, {vt, times(-theta, vt), times(-phi, vt), times(phi * theta, vt)});
      return w;
    }

    const auto v = dftBeam(p_, i11, i12, false);
    if (r == 1) {
      put(0, {v, times(phi, v)});
      return w;
    }
    const auto off = offsets_[i13];
    const int l2 = (i11 + off.k1Mult * p_.o1) % (p_.n1 * p_.o1);
    const int m2 = (i12 + off.k2Mult * p_.o2) % (p_.n2 * p_.o2);
    const auto v2 = dftBeam(p_, l2, m2, false);
    if (r == 2) {
      put(0, {v, times(phi, v)});
      put(1, {v2, times(-phi, v2)});
    } else {
      put(0, {v, times(phi, v)});
      put(1, {v2, times(phi, v2)});
      put(2, {v, times(-phi, v)});
      if (r == 4) put(3, {v2, times(-phi, v2)});
    }
    return w;
  }

  int numBlocks() const override { return tilde_ ? 4 : 2; }
  int beamLength() const override { return tilde_ ? p_.n1 * p_.n2 / 2 : p_.n1 * p_.n2; }
  int numBeams() const override { return static_cast<int>(beams_.size()); }
  const std::vector<cd>& beam(int b) const override { return beams_.at(b); }

  PrecoderStructure structure(int i1, int i2) const override {
    checkIndex(i1, i2);
    const auto [i11, i12, i13] = unpackI1(i1, numI11_, numI12_);
    PrecoderStructure s;
    s.numCols = p_.rank;
    s.scale = 1.0 / std::sqrt(static_cast<double>(p_.rank * p_.numPorts));
    const cd phi = cophase(i2);
    const int b1 = i11 * numI12_ + i12;
    if (tilde_) {
      const cd theta = interPanelPhase(i13);
      s.beam.fill(b1);
      s.coef[0] = {1.0, theta, phi, phi * theta};
      s.coef[1] = {1.0, -theta, phi, -phi * theta};
      s.coef[2] = {1.0, theta, -phi, -phi * theta};
      s.coef[3] = {1.0, -theta, -phi, phi * theta};
      return s;
    }
    if (p_.rank == 1) {
      s.beam[0] = b1;
      s.coef[0] = {1.0, phi};
      return s;
    }
    const auto off = offsets_[i13];
    const int l2 = (i11 + off.k1Mult * p_.o1) % (p_.n1 * p_.o1);
    const int m2 = (i12 + off.k2Mult * p_.o2) % (p_.n2 * p_.o2);
    const int b2 = l2 * numI12_ + m2;
    if (p_.rank == 2) {
      s.beam[0] = b1;
      s.beam[1] = b2;
      s.coef[0] = {1.0, phi};
      s.coef[1] = {1.0, -phi};
      return s;
    }
    s.beam = {b1, b2, b1, b2};
    s.coef[0] = {1.0, phi};
    s.coef[1] = {1.0, phi};
    s.coef[2] = {1.0, -phi};
    s.coef[3] = {1.0, -phi};
    return s;
  }

 private:
  CodebookParams p_;
  bool tilde_ = false;
  int numI11_ = 1, numI12_ = 1, numI13_ = 1, numI2_ = 1;
  std::vector<tables::BeamOffset> offsets_;
  std::vector<std::vector<cd>> beams_;
};

/// One fixed precoder: the first `rank` identity columns scaled by 1/sqrt(rank).
class FixedCodebook final : public Codebook {
 public:
  FixedCodebook(int ports, int rank) : ports_(ports), rank_(rank) {
    if (rank < 1 || rank > ports || rank > kMaxRank)
      throw CodebookError("fixed precoder: rank " + std::to_string(rank) + " exceeds " +
                          std::to_string(ports) + " ports");
    for (int k = 0; k < rank; ++k) {
      auto v = std::vector<cd>(ports, cd{});
      v[k] = 1.0;
      beams_.push_back(std::move(v));
    }
  }
  int numPorts() const override { return ports_; }
  int rank() const override { return rank_; }
  int numI1() const override { return 1; }
  int numI2() const override { return 1; }
  ComplexMatrixArray precoderAt(int i1, int i2) const override {
    checkIndex(i1, i2);
    ComplexMatrixArray w(ports_, rank_);
    for (int k = 0; k < rank_; ++k) w(k, k) = 1.0 / std::sqrt(static_cast<double>(rank_));
    return w;
  }
  int numBlocks() const override { return 1; }
  int beamLength() const override { return ports_; }
  int numBeams() const override { return rank_; }
  const std::vector<cd>& beam(int b) const override { return beams_.at(b); }
  PrecoderStructure structure(int i1, int i2) const override {
    checkIndex(i1, i2);
    PrecoderStructure s;
    s.numCols = rank_;
    s.scale = 1.0 / std::sqrt(static_cast<double>(rank_));
    for (int k = 0; k < rank_; ++k) {
      s.beam[k] = k;
      s.coef[k][0] = 1.0;
    }
    return s;
  }

 private:
  int ports_;
  int rank_;
  std::vector<std::vector<cd>> beams_;
};

inline std::unique_ptr<Codebook> makeTwoPort(int numPorts, int rank) {
  return std::make_unique<TwoPortCodebook>(numPorts, rank);
}

inline std::unique_ptr<Codebook> makeTypeOneSp(const CodebookParams& params) {
  return std::make_unique<TypeOneSpCodebook>(params);
}

/// Codebook for a gNB with n1 x n2 ports per polarization (numPorts total).
/// Up to two ports use the two-port table; more use the single-panel codebook.
inline std::unique_ptr<Codebook> makeCodebook(int numPorts, int n1, int n2, int rank) {
  if (rank < 1 || rank > kMaxRank) throw CodebookError("unsupported: rank " + std::to_string(rank));
  if (numPorts <= 2) return makeTwoPort(numPorts, rank);
  return makeTypeOneSp(CodebookParams::singlePanel(n1, n2, rank));
}

}  // namespace nrmimo
