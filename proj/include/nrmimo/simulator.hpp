/**
 * @file simulator.hpp
 * @brief Slot-driven closed-loop link simulation: one serving gNB/UE pair,
 * an optional interfering pair, CSI feedback with K1 delay.
 *
 * Units: every channel is scaled by sqrt(P_rb / N_rb), where P_rb is the gNB
 * power per RB and N_rb the UE noise power per RB. The noise covariance is
 * then the identity.
 */
#pragma once

#include <chrono>
#include <cstdio>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nrmimo/channel.hpp"
#include "nrmimo/link_abstraction.hpp"
#include "nrmimo/mimo_sinr.hpp"
#include "nrmimo/pm_search.hpp"
#include "nrmimo/random.hpp"
#include "nrmimo/scenario.hpp"

namespace nrmimo {

struct Metrics {
  double throughputBps = 0;
  double avgMcs = 0;
  double avgRank = 0;
  long tbCount = 0;
  long tbErrorCount = 0;
  double wallClockSeconds = 0;
  long csiSearchCount = 0;  ///< CSI refresh instants (WB or SB)
  long wbSearchCount = 0;
  long sbRefreshCount = 0;  ///< includes the SB part of every WB refresh
  double csiSearchSeconds = 0;
  long deliveredBits = 0;
  double simulatedSeconds = 0;
};

struct Device {
  LinkChannel::Endpoint endpoint;
};

struct NodePair {
  int id = 0;
  Device gnb;
  Device ue;
};

struct PendingFeedback {
  long applySlot = 0;
  CsiFeedback fb;
};

struct SimulationState {
  ScenarioConfig cfg;
  std::vector<NodePair> pairs;
  std::unique_ptr<LinkChannel> serving;
  std::unique_ptr<LinkChannel> interfering;  ///< interferer gNB -> serving UE
  std::shared_ptr<const CodebookSet> codebooks;
  McsTable mcsTable;
  double noisePerRbDbm = 0;
  double channelScale = 1;  ///< sqrt(P_rb / N_rb)
  Random decodeRng{0};
  bool recordTraces = true;
  std::string tbTrace;
  std::string feedbackTrace;
};

inline std::shared_ptr<const CodebookSet> makeCodebookSet(const ScenarioConfig& cfg) {
  return std::make_shared<const CodebookSet>(cfg.gnbPorts(), cfg.gnb.nH, cfg.gnb.nV, cfg.pm.rankLimit);
}

inline std::string tbTraceHeader() { return "timeMs,pairId,rank,mcs,tbBits,success,effSinrDb"; }

inline SimulationState buildScenario(const ScenarioConfig& cfg, std::shared_ptr<const CodebookSet> books = nullptr,
                                     bool recordTraces = true) {
  cfg.validate();
  SimulationState st;
  st.cfg = cfg;
  st.recordTraces = recordTraces;
  st.mcsTable = McsTable(cfg.link);
  st.codebooks = books ? std::move(books) : makeCodebookSet(cfg);
  if (st.codebooks->numPorts() != cfg.gnbPorts()) throw ConfigError("codebook set does not match the gNB ports");

  auto device = [&](bool gnb, Vec3 pos, double bearing, Vec3 peer) {
    Device d;
    d.endpoint.geometry = gnb ? cfg.gnbGeometry() : cfg.ueGeometry(bearing);
    if (gnb) d.endpoint.geometry.bearingDeg = bearing;
    d.endpoint.ports = gnb ? cfg.gnbPortConfig() : cfg.uePortConfig();
    d.endpoint.position = pos;
    d.endpoint.beam = directionTo(pos, peer);
    return d;
  };

  const Vec3 gnb0{0, 0, cfg.gnbHeightM};
  const Vec3 ue0{cfg.distanceM, 0, cfg.ueHeightM};
  st.pairs.push_back({0, device(true, gnb0, cfg.gnbBearingDeg, ue0), device(false, ue0, cfg.ueBearingDeg, gnb0)});
  if (cfg.interference) {
    const Vec3 gnb1{cfg.interfererGnbX, 0, cfg.gnbHeightM};
    const Vec3 ue1{cfg.interfererUeX, 0, cfg.ueHeightM};
    // mirrored pair: both bearings turned by 180 degrees
    st.pairs.push_back({1, device(true, gnb1, cfg.gnbBearingDeg + 180.0, ue1),
                        device(false, ue1, cfg.ueBearingDeg - 180.0, gnb1)});
  }

  const auto nRb = static_cast<std::size_t>(cfg.numRb);
  st.serving = std::make_unique<LinkChannel>(st.pairs[0].gnb.endpoint, st.pairs[0].ue.endpoint,
                                             cfg.carrierFrequencyHz, nRb, cfg.rbBandwidthHz, cfg.cluster,
                                             cfg.channelUpdatePeriodMs, cfg.losUpdatePeriodMs, cfg.seed, 0);
  if (cfg.interference) {
    // the serving UE keeps its beam on its own gNB; the interferer beams at its own UE
    st.interfering = std::make_unique<LinkChannel>(st.pairs[1].gnb.endpoint, st.pairs[0].ue.endpoint,
                                                   cfg.carrierFrequencyHz, nRb, cfg.rbBandwidthHz, cfg.cluster,
                                                   cfg.channelUpdatePeriodMs, cfg.losUpdatePeriodMs, cfg.seed, 1);
  }
  st.noisePerRbDbm = cfg.ueNoisePerRbDbm();
  const double txPerRbDbm = cfg.gnbTxPowerDbm - 10.0 * std::log10(cfg.numRb);
  st.channelScale = std::sqrt(fromDb(txPerRbDbm - st.noisePerRbDbm));
  st.decodeRng = makeStream(cfg.seed, Stream::kDecode, 0);
  return st;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline Metrics runSlots(SimulationState& st) {
  using Clock = std::chrono::steady_clock;
  const auto wallStart = Clock::now();
  const auto& cfg = st.cfg;
  const auto& books = *st.codebooks;
  const int nRb = cfg.numRb;
  const long numSlots = static_cast<long>(std::floor(cfg.simDurationMs + 1e-9));  // 1 ms slots
  const int gnbPorts = cfg.gnbPorts();

  Metrics m;
  m.simulatedSeconds = numSlots * 1e-3;

  int servingGen = -1, intfGen = -1;
  IntfNormChannel hNorm;
  std::optional<ComplexMatrixArray> interfererPrecoder;
  if (cfg.interference) interfererPrecoder = dummyPrecoder(gnbPorts, 1, nRb);

  std::deque<PendingFeedback> pending;
  std::optional<CsiFeedback> applied;   // in force at the gNB
  std::optional<CsiFeedback> measured;  // latest UE report
  std::optional<double> lastWb, lastSb;
  ComplexMatrixArray txPrecoder = dummyPrecoder(gnbPorts, 1, nRb);
  const auto noFbPrecoder = txPrecoder;

  double cbrBucket = 0;
  double mcsSum = 0, rankSum = 0;
  std::vector<SignalChunk> chunks(1);

  for (long slot = 0; slot < numSlots; ++slot) {
    const double now = static_cast<double>(slot);

    // channel cadence
    const auto& hs = st.serving->at(now);
    bool changed = st.serving->generations() != servingGen;
    if (st.interfering) {
      st.interfering->at(now);
      changed = changed || st.interfering->generations() != intfGen;
    }
    if (changed) {
      servingGen = st.serving->generations();
      auto h = hs.portChannel * cd(st.channelScale);
      auto cov = noiseCovariance(1.0, h.rows(), h.pages());
      if (st.interfering) {
        intfGen = st.interfering->generations();
        const auto hi = st.interfering->at(now).portChannel * cd(st.channelScale);
        cov = addInterference(cov, hi, *interfererPrecoder);
      }
      hNorm = whitenChannel(h, cov);
    }

    // feedback reaching the gNB
    while (!pending.empty() && pending.front().applySlot <= slot) {
      applied = std::move(pending.front().fb);
      pending.pop_front();
      txPrecoder = cfg.mimoFeedback ? precoderFromFeedback(books, *applied, nRb, cfg.pm.subbandSizeRb) : noFbPrecoder;
    }

    // UE-side CSI
    const auto refresh = feedbackScheduler(cfg.pm, now, lastWb, lastSb);
    if (refresh.refreshSb) {
      const auto t0 = Clock::now();
      CsiFeedback fb;
      if (!cfg.mimoFeedback) {
        fb.ri = 1;
        fb.i2PerSubband.assign(numSubbands(nRb, cfg.pm.subbandSizeRb), 0);
        const auto s = computeSinr(hNorm, noFbPrecoder);
        fb.capacity = capacity(s);
        fillLinkQuality(fb, s, st.mcsTable, nRb);
        fb.generatedAtMs = now;
      } else if (refresh.refreshWb || !measured) {
        fb = exhaustiveSearch(hNorm, books, cfg.pm, st.mcsTable, now);
      } else {
        fb = refreshSubbands(hNorm, books, *measured, cfg.pm, st.mcsTable, now);
      }
      m.csiSearchSeconds += std::chrono::duration<double>(Clock::now() - t0).count();
      if (refresh.refreshWb) {
        ++m.wbSearchCount;
        lastWb = now;
      }
      ++m.sbRefreshCount;
      ++m.csiSearchCount;
      lastSb = now;
      measured = fb;
      if (st.recordTraces) st.feedbackTrace += feedbackCsvRow(fb, 1) + "\n";
      pending.push_back({slot + cfg.k1Slots, std::move(fb)});
      if (cfg.k1Slots == 0) {
        applied = pending.back().fb;
        pending.pop_back();
        txPrecoder = cfg.mimoFeedback ? precoderFromFeedback(books, *applied, nRb, cfg.pm.subbandSizeRb) : noFbPrecoder;
      }
    }

    // downlink TB
    const int rank = (applied && cfg.mimoFeedback) ? applied->ri : 1;
    const int mcs = applied ? applied->mcs : 0;
    const long tbBits = tbSize(mcs, rank, nRb);
    chunks[0].sinr = computeSinr(hNorm, txPrecoder);
    chunks[0].durationSymbols = cfg.symbolsPerSlot;
    const auto dec = tbDecodeMimo(chunks, mcs, rank, st.mcsTable, st.decodeRng);

    long bits = 0;
    if (cfg.cbrRateBps > 0) cbrBucket += cfg.cbrRateBps * 1e-3;
    if (dec.success) {
      bits = tbBits;
      if (cfg.cbrRateBps > 0) {
        bits = std::min<long>(bits, static_cast<long>(cbrBucket));
        cbrBucket -= bits;
      }
    } else {
      ++m.tbErrorCount;
    }
    m.deliveredBits += bits;
    ++m.tbCount;
    mcsSum += mcs;
    rankSum += rank;
    if (st.recordTraces) {
      st.tbTrace += std::to_string(slot) + ",0," + std::to_string(rank) + "," + std::to_string(mcs) + "," +
                    std::to_string(tbBits) + "," + (dec.success ? "1" : "0") + "," +
                    detail::fixed(toDb(std::max(dec.effSinr, 1e-30)), 4) + "\n";
    }
  }

  if (m.tbCount > 0) {
    m.avgMcs = mcsSum / m.tbCount;
    m.avgRank = rankSum / m.tbCount;
  }
  if (m.simulatedSeconds > 0) m.throughputBps = cfg.dutyFactor * m.deliveredBits / m.simulatedSeconds;
  m.wallClockSeconds = std::chrono::duration<double>(Clock::now() - wallStart).count();
  return m;
}

/// buildScenario + runSlots.
inline Metrics simulate(const ScenarioConfig& cfg, std::shared_ptr<const CodebookSet> books = nullptr,
                        SimulationState* keep = nullptr) {
  auto st = buildScenario(cfg, std::move(books), keep != nullptr);
  auto m = runSlots(st);
  if (keep) *keep = std::move(st);
  return m;
}

}  // namespace nrmimo
