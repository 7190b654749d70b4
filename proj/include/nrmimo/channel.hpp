/**
 * @file channel.hpp
 * @brief Synthetic clustered frequency-domain channel, UMa-style pathloss and
 * LOS probability, TXRU virtualization to port level, and a per-link cache
 * that honours the channel / LOS update periods.
 *
 * Cluster model (all constants in ClusterParams):
 *  - L clusters, exponential power profile with `decayDb` per cluster,
 *    normalized to unit total power;
 *  - in LOS the first cluster is the deterministic direct ray carrying
 *    K/(K+1) of the power, the other L-1 clusters share 1/(K+1);
 *  - cluster angles Gaussian around the direct-path direction at each end;
 *  - delays uniform in [0, maxDelay] (direct ray at zero delay);
 *  - 2x2 polarization matrix per cluster with cross terms attenuated by XPR
 *    and random phases, projected onto the element slants with (cos, sin).
 */
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "nrmimo/antenna.hpp"
#include "nrmimo/matrix_array.hpp"
#include "nrmimo/random.hpp"

namespace nrmimo {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

struct LinkGeometry {
  Vec3 txPosition;
  Vec3 rxPosition;  ///< the UE end in a downlink
  double carrierFrequencyHz = 4e9;
  std::size_t nRb = 52;
  double rbBandwidthHz = 180e3;

  double distance2d() const {
    return std::hypot(rxPosition.x - txPosition.x, rxPosition.y - txPosition.y);
  }
  double distance3d() const {
    return std::hypot(distance2d(), rxPosition.z - txPosition.z);
  }
  double wavelengthM() const { return 299792458.0 / carrierFrequencyHz; }
  /// Offset of RB centre from the carrier.
  double rbOffsetHz(std::size_t rb) const {
    return (static_cast<double>(rb) - (static_cast<double>(nRb) - 1.0) / 2.0) * rbBandwidthHz;
  }
};

/// Direction from `from` toward `to`.
inline BeamDirection directionTo(const Vec3& from, const Vec3& to) {
  const double dx = to.x - from.x, dy = to.y - from.y, dz = to.z - from.z;
  const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  return {radToDeg(std::atan2(dy, dx)), radToDeg(std::acos(dz / d))};
}

enum class LosState { kLos, kNlos };

/// Simplified UMa pathloss (no breakpoint distance, no shadowing).
inline double pathlossUmaDb(const LinkGeometry& link, LosState los) {
  const double d = link.distance3d();
  const double fGhz = link.carrierFrequencyHz / 1e9;
  const double plLos = 28.0 + 22.0 * std::log10(d) + 20.0 * std::log10(fGhz);
  if (los == LosState::kLos) return plLos;
  const double hUe = link.rxPosition.z;
  const double plNlos = 13.54 + 39.08 * std::log10(d) + 20.0 * std::log10(fGhz) - 0.6 * (hUe - 1.5);
  return std::max(plLos, plNlos);
}

/// UMa LOS probability as a function of 2D distance and UE height.
inline double losProbabilityUma(double d2d, double hUe) {
  if (d2d <= 18.0) return 1.0;
  double cPrime = 0.0;
  if (hUe > 13.0) cPrime = std::pow((hUe - 13.0) / 10.0, 1.5);
  const double base = 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
  return base * (1.0 + cPrime * 1.25 * std::pow(d2d / 100.0, 3.0) * std::exp(-d2d / 150.0));
}

struct ClusterParams {
  int numClusters = 10;
  double decayDbPerCluster = 3.0;
  double azimuthSpreadDeg = 20.0;
  double zenithSpreadDeg = 5.0;
  double maxDelayNs = 300.0;
  double riceanKDb = 9.0;
  double xprDb = 8.0;
  bool applyPathloss = true;
};

struct Cluster {
  double power = 0;
  BeamDirection txDir;  ///< departure direction at the transmitter
  BeamDirection rxDir;  ///< arrival direction at the receiver (pointing back)
  double delayS = 0;
  std::array<cd, 4> polarization{};  ///< [vv, vh, hv, hh], row = rx, col = tx
};

struct ClusterState {
  LosState los = LosState::kNlos;
  double pathlossDb = 0;
  std::vector<Cluster> clusters;
};

inline ClusterState drawClusters(const LinkGeometry& link, LosState los,
                                 const ClusterParams& params, Random& rng) {
  ClusterState st;
  st.los = los;
  st.pathlossDb = params.applyPathloss ? pathlossUmaDb(link, los) : 0.0;
  const BeamDirection txLos = directionTo(link.txPosition, link.rxPosition);
  const BeamDirection rxLos = directionTo(link.rxPosition, link.txPosition);
  const double xprScale = std::pow(10.0, -params.xprDb / 20.0);
  const double twoPi = 2.0 * std::numbers::pi;

  const int n = std::max(1, params.numClusters);
  const bool withLos = los == LosState::kLos;
  const int scattered = withLos ? n - 1 : n;
  const double k = std::pow(10.0, params.riceanKDb / 10.0);
  const double scatteredShare = withLos ? (scattered > 0 ? 1.0 / (k + 1.0) : 0.0) : 1.0;

  if (withLos) {
    Cluster c;
    c.power = scattered > 0 ? k / (k + 1.0) : 1.0;
    c.txDir = txLos;
    c.rxDir = rxLos;
    c.delayS = 0.0;
    const cd direct = std::polar(1.0, -twoPi * link.distance3d() / link.wavelengthM());
    c.polarization = {direct, 0.0, 0.0, -direct};
    st.clusters.push_back(c);
  }
  double sum = 0;
  std::vector<double> raw(scattered);
  for (int i = 0; i < scattered; ++i) sum += raw[i] = std::pow(10.0, -params.decayDbPerCluster * i / 10.0);
  auto clampZen = [](double z) { return std::clamp(z, 0.0, 180.0); };
  for (int i = 0; i < scattered; ++i) {
    Cluster c;
    c.power = scatteredShare * raw[i] / sum;
    c.txDir = {txLos.azimuthDeg + rng.normal(0.0, params.azimuthSpreadDeg),
               clampZen(txLos.zenithDeg + rng.normal(0.0, params.zenithSpreadDeg))};
    c.rxDir = {rxLos.azimuthDeg + rng.normal(0.0, params.azimuthSpreadDeg),
               clampZen(rxLos.zenithDeg + rng.normal(0.0, params.zenithSpreadDeg))};
    c.delayS = rng.uniform(0.0, params.maxDelayNs * 1e-9);
    c.polarization = {std::polar(1.0, twoPi * rng.uniform()),
                      std::polar(xprScale, twoPi * rng.uniform()),
                      std::polar(xprScale, twoPi * rng.uniform()),
                      std::polar(1.0, twoPi * rng.uniform())};
    st.clusters.push_back(c);
  }
  return st;
}

/// Polarization coupling between one rx slant and one tx slant.
inline cd polarizationCoupling(const std::array<cd, 4>& m, double rxSlantDeg, double txSlantDeg) {
  const double cr = std::cos(degToRad(rxSlantDeg)), sr = std::sin(degToRad(rxSlantDeg));
  const double ct = std::cos(degToRad(txSlantDeg)), st = std::sin(degToRad(txSlantDeg));
  return cr * (m[0] * ct + m[1] * st) + sr * (m[2] * ct + m[3] * st);
}

/// Element-level channel: rxElems x txElems x nRb.
inline ComplexMatrixArray channelFromClusters(const LinkGeometry& link, const ArrayGeometry& txGeom,
                                              const ArrayGeometry& rxGeom, const ClusterState& st) {
  const int nTx = txGeom.totalElements();
  const int nRx = rxGeom.totalElements();
  const int txPerPol = txGeom.elementsPerPolarization();
  const int rxPerPol = rxGeom.elementsPerPolarization();
  ComplexMatrixArray h(nRx, nTx, link.nRb);
  const double gain = std::pow(10.0, (-st.pathlossDb + txGeom.elementGainDbi + rxGeom.elementGainDbi) / 20.0);

  std::vector<cd> outer(static_cast<std::size_t>(nRx) * nTx);
  for (const auto& cl : st.clusters) {
    const auto aTx = steeringVector(txGeom, cl.txDir);
    const auto aRx = steeringVector(rxGeom, cl.rxDir);
    const double amp = std::sqrt(cl.power) * gain;
    for (int t = 0; t < nTx; ++t) {
      const double txSlant = txGeom.polarizationSlantsDeg[t / txPerPol];
      for (int r = 0; r < nRx; ++r) {
        const double rxSlant = rxGeom.polarizationSlantsDeg[r / rxPerPol];
        outer[static_cast<std::size_t>(t) * nRx + r] =
            amp * polarizationCoupling(cl.polarization, rxSlant, txSlant) * aRx[r] * aTx[t];
      }
    }
    for (std::size_t rb = 0; rb < link.nRb; ++rb) {
      const cd rot = std::polar(1.0, -2.0 * std::numbers::pi * link.rbOffsetHz(rb) * cl.delayS);
      auto page = h.page(rb);
      for (std::size_t i = 0; i < outer.size(); ++i) page[i] += outer[i] * rot;
    }
  }
  return h;
}

struct ElementChannel {
  ComplexMatrixArray h;  ///< rxElems x txElems x nRb
  ClusterState state;
};

inline ElementChannel generateChannel(const LinkGeometry& link, const ArrayGeometry& txGeom,
                                      const ArrayGeometry& rxGeom, LosState los, Random& rng,
                                      const ClusterParams& params = {}) {
  auto st = drawClusters(link, los, params, rng);
  auto h = channelFromClusters(link, txGeom, rxGeom, st);
  return {std::move(h), std::move(st)};
}

/// Draws the LOS state from the UMa LOS probability, then the channel.
inline ElementChannel generateChannel(const LinkGeometry& link, const ArrayGeometry& txGeom,
                                      const ArrayGeometry& rxGeom, Random& rng,
                                      const ClusterParams& params = {}) {
  const LosState los = rng.bernoulli(losProbabilityUma(link.distance2d(), link.rxPosition.z))
                           ? LosState::kLos
                           : LosState::kNlos;
  return generateChannel(link, txGeom, rxGeom, los, rng, params);
}

/// Unit-norm analog weights of one port, steered to `dir`. Phases are taken
/// relative to the port's first element, so the inter-port phase stays in the
/// port channel for the digital precoder.
inline std::vector<cd> portWeights(const ArrayGeometry& geom, const std::vector<int>& elems,
                                   BeamDirection dir) {
  const auto a = steeringVector(geom, dir);
  std::vector<cd> w(elems.size());
  const double norm = 1.0 / std::sqrt(static_cast<double>(elems.size()));
  const cd ref = std::conj(a[elems.front()]);
  for (std::size_t i = 0; i < elems.size(); ++i) w[i] = a[elems[i]] * ref * norm;
  return w;
}

struct ChannelRealization {
  ComplexMatrixArray portChannel;  ///< rxPorts x txPorts x nRb
  double generatedAtMs = 0;
  ClusterState clusterState;
};

/// Collapses an element channel to ports:
/// port(r, t) = w_r^H H_sub w_t with w_r = a_rx / sqrt(n), w_t = conj(a_tx) / sqrt(n),
/// the same beam direction for every port of a device.
inline ComplexMatrixArray applyTxru(const ComplexMatrixArray& elem, const ArrayGeometry& txGeom,
                                    const PortMap& txMap, BeamDirection txBeam,
                                    const ArrayGeometry& rxGeom, const PortMap& rxMap,
                                    BeamDirection rxBeam) {
  if (elem.rows() != static_cast<std::size_t>(rxGeom.totalElements()) ||
      elem.cols() != static_cast<std::size_t>(txGeom.totalElements())) {
    throw DimensionError("applyTxru: element channel does not match the geometries");
  }
  std::vector<std::vector<cd>> wTx, wRx;
  for (const auto& e : txMap) {
    auto w = portWeights(txGeom, e, txBeam);
    for (auto& v : w) v = std::conj(v);
    wTx.push_back(std::move(w));
  }
  for (const auto& e : rxMap) wRx.push_back(portWeights(rxGeom, e, rxBeam));

  ComplexMatrixArray out(rxMap.size(), txMap.size(), elem.pages());
  for (std::size_t p = 0; p < elem.pages(); ++p) {
    for (std::size_t t = 0; t < txMap.size(); ++t) {
      for (std::size_t r = 0; r < rxMap.size(); ++r) {
        cd acc{};
        for (std::size_t i = 0; i < rxMap[r].size(); ++i) {
          cd inner{};
          for (std::size_t j = 0; j < txMap[t].size(); ++j)
            inner += elem(rxMap[r][i], txMap[t][j], p) * wTx[t][j];
          acc += std::conj(wRx[r][i]) * inner;
        }
        out(r, t, p) = acc;
      }
    }
  }
  return out;
}

/// One directed link (one transmitter, one receiver) with its cached
/// realization. The realization is regenerated only once the update period
/// has elapsed; the LOS state is redrawn on its own period.
class LinkChannel {
 public:
  struct Endpoint {
    ArrayGeometry geometry;
    PortConfig ports;
    Vec3 position;
    BeamDirection beam;  ///< analog beam direction of this device
  };

  LinkChannel(Endpoint tx, Endpoint rx, double carrierHz, std::size_t nRb, double rbBandwidthHz,
              ClusterParams params, double updatePeriodMs, double losUpdatePeriodMs,
              std::uint64_t seed, std::uint64_t linkId)
      : tx_(std::move(tx)),
        rx_(std::move(rx)),
        params_(params),
        updatePeriodMs_(updatePeriodMs),
        losUpdatePeriodMs_(losUpdatePeriodMs),
        channelRng_(makeStream(seed, Stream::kChannel, linkId)),
        losRng_(makeStream(seed, Stream::kLosState, linkId)) {
    link_.txPosition = tx_.position;
    link_.rxPosition = rx_.position;
    link_.carrierFrequencyHz = carrierHz;
    link_.nRb = nRb;
    link_.rbBandwidthHz = rbBandwidthHz;
    txMap_ = elementToPortMap(tx_.ports, tx_.geometry);
    rxMap_ = elementToPortMap(rx_.ports, rx_.geometry);
  }

  /// Current realization at simulation time `nowMs`.
  const ChannelRealization& at(double nowMs) {
    if (!losDrawnAtMs_ || nowMs - *losDrawnAtMs_ >= losUpdatePeriodMs_) {
      const double pLos = losProbabilityUma(link_.distance2d(), link_.rxPosition.z);
      los_ = losRng_.bernoulli(pLos) ? LosState::kLos : LosState::kNlos;
      losDrawnAtMs_ = nowMs;
    }
    if (!current_ || nowMs - current_->generatedAtMs >= updatePeriodMs_) {
      auto elem = generateChannel(link_, tx_.geometry, rx_.geometry, los_, channelRng_, params_);
      ChannelRealization r;
      r.portChannel = applyTxru(elem.h, tx_.geometry, txMap_, tx_.beam, rx_.geometry, rxMap_, rx_.beam);
      r.generatedAtMs = nowMs;
      r.clusterState = std::move(elem.state);
      current_ = std::move(r);
      ++generations_;
    }
    return *current_;
  }

  const LinkGeometry& geometry() const { return link_; }
  int generations() const { return generations_; }

 private:
  Endpoint tx_;
  Endpoint rx_;
  LinkGeometry link_;
  PortMap txMap_;
  PortMap rxMap_;
  ClusterParams params_;
  double updatePeriodMs_;
  double losUpdatePeriodMs_;
  Random channelRng_;
  Random losRng_;
  LosState los_ = LosState::kNlos;
  std::optional<double> losDrawnAtMs_;
  std::optional<ChannelRealization> current_;
  int generations_ = 0;
};

}  // namespace nrmimo
