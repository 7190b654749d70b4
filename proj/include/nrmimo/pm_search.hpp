/**
 * @file pm_search.hpp
 * @brief Exhaustive PMI/RI search, CSI feedback construction and the
 * WB/SB refresh scheduler.
 *
 * PMI selection maximizes the Shannon capacity sum_l log2(1 + SINR_l):
 * per subband the best i2 for each i1, summed over subbands, best i1 kept.
 * The rank is then the one with the largest achievable TB size.
 * Ties go to the lower rank, then the lower i1, then the lower i2.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nrmimo/codebook.hpp"
#include "nrmimo/link_abstraction.hpp"
#include "nrmimo/mimo_sinr.hpp"

namespace nrmimo {

struct PmSearchConfig {
  int rankLimit = 4;
  double wbUpdateIntervalMs = 10.0;
  double sbUpdateIntervalMs = 2.0;
  int subbandSizeRb = 4;

  void validate() const {
    if (rankLimit < 1 || rankLimit > kMaxRank) throw std::invalid_argument("rankLimit must be in 1..4");
    if (!(wbUpdateIntervalMs > 0) || !(sbUpdateIntervalMs > 0))
      throw std::invalid_argument("PMI update intervals must be > 0");
    if (sbUpdateIntervalMs > wbUpdateIntervalMs)
      throw std::invalid_argument("SB update interval must not exceed the WB interval");
    if (subbandSizeRb < 1) throw std::invalid_argument("subbandSizeRb must be >= 1");
  }
};

/// Relative tolerance under which two capacities count as equal.
inline constexpr double kCapacityTieTol = 1e-10;

inline bool clearlyGreater(double a, double b) {
  if (std::isinf(b)) return a > b;
  return a > b + kCapacityTieTol * std::max(1.0, std::abs(b));
}

inline double capacity(const SinrMatrix& s, std::size_t rbBegin, std::size_t rbEnd) {
  double c = 0;
  for (std::size_t rb = rbBegin; rb < std::min(rbEnd, s.nRb()); ++rb)
    for (std::size_t l = 0; l < s.rank(); ++l) c += std::log2(1.0 + s(l, rb));
  return c;
}

inline double capacity(const SinrMatrix& s) { return capacity(s, 0, s.nRb()); }

inline int numSubbands(int nRb, int subbandSizeRb) { return (nRb + subbandSizeRb - 1) / subbandSizeRb; }

struct CsiFeedback {
  int ri = 1;
  int i1 = 0;
  std::vector<int> i2PerSubband;
  int wbCqi = 0;
  int mcs = 0;
  long tbSizeBits = 0;
  double generatedAtMs = 0;
  double capacity = 0;  ///< wideband capacity of the chosen PMI
};

/// Codebooks for ranks 1..maxRank of one gNB port layout.
class CodebookSet {
 public:
  /// n1 x n2 ports per polarization; numPorts <= 2 selects the two-port table.
  CodebookSet(int numPorts, int n1, int n2, int maxRank) : numPorts_(numPorts) {
    if (maxRank < 1) throw CodebookError("CodebookSet: maxRank must be >= 1");
    for (int r = 1; r <= std::min({maxRank, kMaxRank, numPorts}); ++r)
      books_.push_back(makeCodebook(numPorts, n1, n2, r));
  }
  int numPorts() const noexcept { return numPorts_; }
  int maxRank() const noexcept { return static_cast<int>(books_.size()); }
  const Codebook& rank(int r) const { return *books_.at(r - 1); }

 private:
  int numPorts_;
  std::vector<std::unique_ptr<Codebook>> books_;
};

inline constexpr std::size_t kMaxRxPorts = 8;

/// H^n restricted to each port block, times every beam of a codebook, per RB.
class BeamProjection {
 public:
  BeamProjection(const IntfNormChannel& h, const Codebook& cb)
      : rx_(h.rows()), nRb_(h.pages()), blocks_(cb.numBlocks()), beams_(cb.numBeams()) {
    if (h.cols() != static_cast<std::size_t>(cb.numPorts()))
      throw DimensionError("BeamProjection: channel has " + std::to_string(h.cols()) + " tx ports, codebook " +
                           std::to_string(cb.numPorts()));
    if (rx_ > kMaxRxPorts) throw DimensionError("BeamProjection: at most 8 rx ports");
    const int len = cb.beamLength();
    v_.assign(nRb_ * blocks_ * beams_ * rx_, cd{});
    for (std::size_t rb = 0; rb < nRb_; ++rb)
      for (int b = 0; b < blocks_; ++b)
        for (int k = 0; k < beams_; ++k) {
          const auto& beam = cb.beam(k);
          cd* out = &v_[index(rb, b, k)];
          for (int i = 0; i < len; ++i) {
            const cd* col = &h(0, b * len + i, rb);
            for (std::size_t r = 0; r < rx_; ++r) out[r] += col[r] * beam[i];
          }
        }
  }

  std::size_t rxPorts() const noexcept { return rx_; }
  std::size_t nRb() const noexcept { return nRb_; }
  const cd* at(std::size_t rb, int block, int beam) const noexcept { return &v_[index(rb, block, beam)]; }

 private:
  std::size_t index(std::size_t rb, int b, int k) const noexcept {
    return ((rb * blocks_ + b) * beams_ + k) * rx_;
  }
  std::size_t rx_, nRb_;
  int blocks_, beams_;
  std::vector<cd> v_;
};

/// Per-stream SINR of a structured precoder on one RB. out has s.numCols entries.
inline void structuredSinr(const BeamProjection& proj, int numBlocks, const PrecoderStructure& s,
                           std::size_t rb, double* out) noexcept {
  const std::size_t rx = proj.rxPorts();
  const std::size_t r = s.numCols;
  cd g[kMaxRxPorts * kMaxRank];  // rx x r
  cd gram[kMaxRank * kMaxRank];
  for (std::size_t k = 0; k < r; ++k) {
    cd* col = g + k * rx;
    for (std::size_t i = 0; i < rx; ++i) col[i] = cd{};
    for (int b = 0; b < numBlocks; ++b) {
      const cd c = s.coef[k][b] * s.scale;
      const cd* v = proj.at(rb, b, s.beam[k]);
      for (std::size_t i = 0; i < rx; ++i) col[i] += c * v[i];
    }
  }
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      cd acc{};
      for (std::size_t i = 0; i < rx; ++i) acc += std::conj(g[a * rx + i]) * g[b * rx + i];
      gram[b * r + a] = acc;
    }
  sinrFromGram(r, gram, out);
}

struct RankSearchResult {
  int i1 = 0;
  std::vector<int> i2PerSubband;
  double capacity = -1;
  SinrMatrix sinr;
};

/// Best i2 per subband for a fixed i1. Fills sinr for the chosen i2s.
inline double bestSubbandI2(const BeamProjection& proj, const Codebook& cb, int i1, int sbSize,
                            std::vector<PrecoderStructure>& scratch, std::vector<int>& i2Out,
                            SinrMatrix* sinrOut) {
  const int nRb = static_cast<int>(proj.nRb());
  const int nSb = numSubbands(nRb, sbSize);
  const int r = cb.rank();
  scratch.resize(cb.numI2());
  for (int i2 = 0; i2 < cb.numI2(); ++i2) scratch[i2] = cb.structure(i1, i2);
  i2Out.assign(nSb, 0);
  double wb = 0;
  double s[kMaxRank];
  for (int sb = 0; sb < nSb; ++sb) {
    const int rb0 = sb * sbSize, rb1 = std::min(nRb, rb0 + sbSize);
    double best = -std::numeric_limits<double>::infinity();
    for (int i2 = 0; i2 < cb.numI2(); ++i2) {
      double c = 0;
      for (int rb = rb0; rb < rb1; ++rb) {
        structuredSinr(proj, cb.numBlocks(), scratch[i2], rb, s);
        for (int l = 0; l < r; ++l) c += std::log2(1.0 + s[l]);
      }
      if (clearlyGreater(c, best)) {
        best = c;
        i2Out[sb] = i2;
      }
    }
    wb += best;
    if (sinrOut) {
      for (int rb = rb0; rb < rb1; ++rb) {
        structuredSinr(proj, cb.numBlocks(), scratch[i2Out[sb]], rb, s);
        for (int l = 0; l < r; ++l) (*sinrOut)(l, rb) = s[l];
      }
    }
  }
  return wb;
}

/// Capacity-optimal (i1, per-subband i2) for one codebook.
inline RankSearchResult searchRank(const IntfNormChannel& hNorm, const Codebook& cb, int sbSize) {
  const BeamProjection proj(hNorm, cb);
  RankSearchResult best;
  best.capacity = -std::numeric_limits<double>::infinity();
  std::vector<PrecoderStructure> scratch;
  std::vector<int> i2s;
  for (int i1 = 0; i1 < cb.numI1(); ++i1) {
    const double c = bestSubbandI2(proj, cb, i1, sbSize, scratch, i2s, nullptr);
    if (clearlyGreater(c, best.capacity)) {
      best.capacity = c;
      best.i1 = i1;
      best.i2PerSubband = i2s;
    }
  }
  best.sinr = SinrMatrix(cb.rank(), hNorm.pages());
  bestSubbandI2(proj, cb, best.i1, sbSize, scratch, i2s, &best.sinr);
  return best;
}

inline void fillLinkQuality(CsiFeedback& fb, const SinrMatrix& sinr, const McsTable& table, int nRb) {
  const auto d = selectMcsAndCqi(sinr.values(), table);
  fb.mcs = d.mcs;
  fb.wbCqi = d.cqi;
  fb.tbSizeBits = achievableTbSize(d, fb.ri, nRb);
}

/// Full WB + SB search over ranks 1..min(rankLimit, codebooks).
inline CsiFeedback exhaustiveSearch(const IntfNormChannel& hNorm, const CodebookSet& books,
                                    const PmSearchConfig& cfg, const McsTable& table, double nowMs = 0) {
  const int nRb = static_cast<int>(hNorm.pages());
  const int maxRank = std::min(cfg.rankLimit, books.maxRank());
  CsiFeedback best;
  best.tbSizeBits = -1;
  for (int r = 1; r <= maxRank; ++r) {
    const auto res = searchRank(hNorm, books.rank(r), cfg.subbandSizeRb);
    CsiFeedback fb;
    fb.ri = r;
    fb.i1 = res.i1;
    fb.i2PerSubband = res.i2PerSubband;
    fb.capacity = res.capacity;
    fb.generatedAtMs = nowMs;
    fillLinkQuality(fb, res.sinr, table, nRb);
    if (fb.tbSizeBits > best.tbSizeBits) best = fb;
  }
  return best;
}

/// SB-only refresh: keeps ri and i1, re-picks i2 per subband and the MCS.
inline CsiFeedback refreshSubbands(const IntfNormChannel& hNorm, const CodebookSet& books,
                                   const CsiFeedback& prev, const PmSearchConfig& cfg,
                                   const McsTable& table, double nowMs = 0) {
  const auto& cb = books.rank(prev.ri);
  const BeamProjection proj(hNorm, cb);
  CsiFeedback fb = prev;
  std::vector<PrecoderStructure> scratch;
  SinrMatrix sinr(cb.rank(), hNorm.pages());
  fb.capacity = bestSubbandI2(proj, cb, prev.i1, cfg.subbandSizeRb, scratch, fb.i2PerSubband, &sinr);
  fb.generatedAtMs = nowMs;
  fillLinkQuality(fb, sinr, table, static_cast<int>(hNorm.pages()));
  return fb;
}

/// Per-RB precoder (ports x ri x nRb) described by a feedback report.
inline ComplexMatrixArray precoderFromFeedback(const CodebookSet& books, const CsiFeedback& fb, int nRb,
                                               int subbandSizeRb) {
  const auto& cb = books.rank(fb.ri);
  ComplexMatrixArray w(cb.numPorts(), fb.ri, nRb);
  for (std::size_t sb = 0; sb < fb.i2PerSubband.size(); ++sb) {
    const auto page = cb.precoderAt(fb.i1, fb.i2PerSubband[sb]);
    for (int rb = static_cast<int>(sb) * subbandSizeRb; rb < std::min(nRb, (static_cast<int>(sb) + 1) * subbandSizeRb); ++rb)
      std::copy(page.page(0).begin(), page.page(0).end(), w.page(rb).begin());
  }
  return w;
}

struct RefreshDecision {
  bool refreshWb = false;
  bool refreshSb = false;
};

/// lastWb/lastSb empty means never refreshed.
inline RefreshDecision feedbackScheduler(const PmSearchConfig& cfg, double nowMs, std::optional<double> lastWbMs,
                                         std::optional<double> lastSbMs) {
  RefreshDecision d;
  d.refreshWb = !lastWbMs || nowMs - *lastWbMs >= cfg.wbUpdateIntervalMs;
  d.refreshSb = d.refreshWb || !lastSbMs || nowMs - *lastSbMs >= cfg.sbUpdateIntervalMs;
  return d;
}

struct RefreshCounts {
  long wb = 0;
  long sb = 0;  ///< includes the SB refresh implied by every WB refresh
};

/// Counts what the scheduler fires over [0, durationMs) at a 1 ms tick.
inline RefreshCounts predictRefreshCounts(const PmSearchConfig& cfg, double durationMs, double tickMs = 1.0) {
  RefreshCounts c;
  std::optional<double> wb, sb;
  for (long k = 0; k * tickMs < durationMs; ++k) {
    const double t = k * tickMs;
    const auto d = feedbackScheduler(cfg, t, wb, sb);
    if (d.refreshWb) {
      ++c.wb;
      wb = t;
    }
    if (d.refreshSb) {
      ++c.sb;
      sb = t;
    }
  }
  return c;
}

inline std::string feedbackCsvHeader() { return "timeMs,rnti,ri,i1,i2,mcs,tbSizeBits"; }

inline std::string feedbackCsvRow(const CsiFeedback& fb, int rnti) {
  std::ostringstream os;
  os << static_cast<long>(std::llround(fb.generatedAtMs)) << ',' << rnti << ',' << fb.ri << ',' << fb.i1 << ',';
  for (std::size_t i = 0; i < fb.i2PerSubband.size(); ++i) os << (i ? ";" : "") << fb.i2PerSubband[i];
  os << ',' << fb.mcs << ',' << fb.tbSizeBits;
  return os.str();
}

}  // namespace nrmimo
