/**
 * @file link_abstraction.hpp
 * @brief EESM effective SINR, logistic BLER curves per MCS, MCS/CQI
 * selection, TB size and the MIMO TB decode.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nrmimo/mcs_table.hpp"
#include "nrmimo/mimo_sinr.hpp"
#include "nrmimo/random.hpp"

namespace nrmimo {

inline double toDb(double lin) { return 10.0 * std::log10(lin); }
inline double fromDb(double db) { return std::pow(10.0, db / 10.0); }

struct McsTableEntry {
  int mcsIndex = 0;
  double spectralEfficiency = 0;
  double snrThresholdDb = 0;  ///< BLER == 0.5 here
  double beta = 1;            ///< EESM beta, linear
};

struct LinkAbstractionParams {
  double implementationLossDb = 2.0;
  double blerSlopeDb = 0.5;
  double blerTarget = 0.1;
  double betaScale = 0.5;
};

class McsTable {
 public:
  explicit McsTable(const LinkAbstractionParams& p = {}) : params_(p) {
    for (int m = 0; m < tables::kNumMcs; ++m) {
      const double se = tables::kMcsTable2Se[m];
      entries_.push_back({m, se, toDb(std::pow(2.0, se) - 1.0) + p.implementationLossDb,
                          std::max(1.0, std::pow(2.0, se) - 1.0) * p.betaScale});
    }
  }

  const LinkAbstractionParams& params() const noexcept { return params_; }
  int size() const noexcept { return static_cast<int>(entries_.size()); }
  const McsTableEntry& operator[](int m) const { return entries_.at(m); }

  /// Logistic BLER of MCS m at linear SINR s.
  double bler(double sinrLinear, int m) const {
    if (!(sinrLinear > 0.0)) return 1.0;
    const double x = (toDb(sinrLinear) - entries_.at(m).snrThresholdDb) / params_.blerSlopeDb;
    return 1.0 / (1.0 + std::exp(x));
  }

 private:
  LinkAbstractionParams params_;
  std::vector<McsTableEntry> entries_;
};

/// -beta * ln(mean(exp(-s / beta))), log-sum-exp form so large SINRs do not underflow.
inline double effectiveSinr(const std::vector<double>& s, double beta) {
  if (s.empty()) throw std::invalid_argument("effectiveSinr: empty SINR vector");
  double lo = s[0];
  for (double v : s) lo = std::min(lo, v);
  double acc = 0;
  for (double v : s) acc += std::exp(-(v - lo) / beta);
  return lo - beta * std::log(acc / static_cast<double>(s.size()));
}

struct McsDecision {
  int mcs = 0;
  int cqi = 0;  ///< 0 means out of range
  double effSinr = 0;
  bool inRange() const noexcept { return cqi > 0; }
};

inline int cqiFromMcs(int mcs) { return 1 + (mcs * 14) / (tables::kNumMcs - 1); }

/// Highest MCS whose BLER at `effSinr` meets the target.
inline McsDecision selectMcsAndCqi(double effSinrLinear, const McsTable& table) {
  for (int m = table.size() - 1; m >= 0; --m)
    if (table.bler(effSinrLinear, m) <= table.params().blerTarget) return {m, cqiFromMcs(m), effSinrLinear};
  return {0, 0, effSinrLinear};
}

/// Same decision when the effective SINR depends on the MCS through beta.
inline McsDecision selectMcsAndCqi(const std::vector<double>& sinr, const McsTable& table) {
  for (int m = table.size() - 1; m >= 0; --m) {
    const double eff = effectiveSinr(sinr, table[m].beta);
    if (table.bler(eff, m) <= table.params().blerTarget) return {m, cqiFromMcs(m), eff};
  }
  return {0, 0, effectiveSinr(sinr, table[0].beta)};
}

inline constexpr int kRePerRb = 144;

inline long tbSize(int mcs, int rank, int nRb) {
  if (mcs < 0 || mcs >= tables::kNumMcs || rank < 1 || nRb < 0)
    throw std::invalid_argument("tbSize: index out of range");
  return static_cast<long>(std::floor(tables::kMcsTable2Se[mcs] * kRePerRb * nRb * rank));
}

/// TB size a feedback report promises: zero when no MCS meets the target.
inline long achievableTbSize(const McsDecision& d, int rank, int nRb) {
  return d.inRange() ? tbSize(d.mcs, rank, nRb) : 0;
}

/// Duration-weighted average of the chunks' SINR matrices.
inline SinrMatrix averageChunks(const std::vector<SignalChunk>& chunks) {
  if (chunks.empty()) throw std::invalid_argument("averageChunks: no chunks");
  const auto rank = chunks[0].sinr.rank();
  const auto nRb = chunks[0].sinr.nRb();
  SinrMatrix avg(rank, nRb);
  double total = 0;
  for (const auto& c : chunks) {
    if (c.sinr.rank() != rank || c.sinr.nRb() != nRb)
      throw std::invalid_argument("averageChunks: chunks with different rank or RB count");
    if (c.durationSymbols < 1) throw std::invalid_argument("averageChunks: duration < 1");
    for (std::size_t i = 0; i < avg.values().size(); ++i)
      avg.values()[i] += c.durationSymbols * c.sinr.values()[i];
    total += c.durationSymbols;
  }
  for (auto& v : avg.values()) v /= total;
  return avg;
}

struct DecodeResult {
  bool success = false;
  double bler = 1.0;
  double effSinr = 0.0;
};

inline DecodeResult tbDecodeMimo(const std::vector<SignalChunk>& chunks, int mcs, int rank,
                                 const McsTable& table, Random& rng) {
  const auto avg = averageChunks(chunks);
  if (static_cast<int>(avg.rank()) != rank)
    throw std::invalid_argument("tbDecodeMimo: chunk rank differs from the TB rank");
  DecodeResult r;
  r.effSinr = effectiveSinr(avg.values(), table[mcs].beta);
  r.bler = table.bler(r.effSinr, mcs);
  r.success = !rng.bernoulli(r.bler);
  return r;
}

}  // namespace nrmimo
