/**
 * @file scenario.hpp
 * @brief Scenario configuration, validation and the flat `key = value`
 * config format.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nrmimo/antenna.hpp"
#include "nrmimo/channel.hpp"
#include "nrmimo/link_abstraction.hpp"
#include "nrmimo/pm_search.hpp"

namespace nrmimo {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct DeviceArrayConfig {
  int rows = 1;
  int cols = 1;
  bool dualPolarized = false;
  int nH = 1;
  int nV = 1;
};

struct ScenarioConfig {
  int campaign = 0;  ///< 0 when not part of a campaign
  std::uint64_t seed = 1;
  double distanceM = 100.0;
  double simDurationMs = 100.0;

  double carrierFrequencyHz = 4e9;
  int numRb = 52;  ///< 10 MHz at 15 kHz subcarrier spacing
  double rbBandwidthHz = 180e3;
  int symbolsPerSlot = 14;
  double gnbTxPowerDbm = 41.0;
  double gnbNoiseFigureDb = 5.0;
  double ueNoiseFigureDb = 7.0;
  double gnbHeightM = 25.0;
  double ueHeightM = 1.5;
  double gnbBearingDeg = 0.0;
  double ueBearingDeg = 180.0;
  double gnbElementGainDbi = 8.0;
  double ueElementGainDbi = 0.0;
  double elementSpacingH = 0.5;
  double elementSpacingV = 0.5;

  DeviceArrayConfig gnb{2, 4, false, 2, 1};
  DeviceArrayConfig ue{2, 2, false, 2, 1};

  double channelUpdatePeriodMs = 100.0;
  double losUpdatePeriodMs = 100.0;
  int k1Slots = 2;

  bool mimoFeedback = true;
  PmSearchConfig pm;

  bool interference = false;
  double interfererGnbX = 1000.0;
  double interfererUeX = 500.0;

  double dutyFactor = 1.0;
  double cbrRateBps = 0.0;  ///< 0 = full buffer

  ClusterParams cluster;
  LinkAbstractionParams link;

  int gnbPorts() const { return gnb.nH * gnb.nV * (gnb.dualPolarized ? 2 : 1); }
  int uePorts() const { return ue.nH * ue.nV * (ue.dualPolarized ? 2 : 1); }

  ArrayGeometry gnbGeometry() const {
    auto g = ArrayGeometry::upa(gnb.rows, gnb.cols, gnb.dualPolarized, gnbBearingDeg, gnbHeightM, gnbElementGainDbi);
    g.elementSpacingH = elementSpacingH;
    g.elementSpacingV = elementSpacingV;
    return g;
  }
  ArrayGeometry ueGeometry(double bearingDeg) const {
    auto g = ArrayGeometry::upa(ue.rows, ue.cols, ue.dualPolarized, bearingDeg, ueHeightM, ueElementGainDbi);
    g.elementSpacingH = elementSpacingH;
    g.elementSpacingV = elementSpacingV;
    return g;
  }
  PortConfig gnbPortConfig() const { return {gnb.nH, gnb.nV, gnb.dualPolarized}; }
  PortConfig uePortConfig() const { return {ue.nH, ue.nV, ue.dualPolarized}; }

  /// Thermal noise plus UE noise figure over one RB, dBm.
  double ueNoisePerRbDbm() const { return -174.0 + 10.0 * std::log10(rbBandwidthHz) + ueNoiseFigureDb; }

  void validate() const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError("invalid scenario: " + what);
    };
    require(distanceM > 0.0, "distanceM must be > 0");
    require(simDurationMs >= 0.0, "simDurationMs must be >= 0");
    require(carrierFrequencyHz >= 1e8 && carrierFrequencyHz <= 1e11, "carrierFrequencyHz out of [0.1, 100] GHz");
    require(numRb >= 1 && numRb <= 275, "numRb must be in 1..275");
    require(rbBandwidthHz > 0.0, "rbBandwidthHz must be > 0");
    require(symbolsPerSlot >= 1, "symbolsPerSlot must be >= 1");
    require(gnbTxPowerDbm >= -30.0 && gnbTxPowerDbm <= 80.0, "gnbTxPowerDbm out of [-30, 80]");
    require(ueNoiseFigureDb >= 0.0 && ueNoiseFigureDb <= 30.0, "ueNoiseFigureDb out of [0, 30]");
    require(gnbNoiseFigureDb >= 0.0 && gnbNoiseFigureDb <= 30.0, "gnbNoiseFigureDb out of [0, 30]");
    require(gnbHeightM > 0.0 && ueHeightM > 0.0, "antenna heights must be > 0");
    require(elementSpacingH > 0.0 && elementSpacingV > 0.0, "element spacing must be > 0");
    require(channelUpdatePeriodMs > 0.0 && losUpdatePeriodMs > 0.0, "update periods must be > 0");
    require(k1Slots >= 0, "k1Slots must be >= 0");
    require(dutyFactor > 0.0 && dutyFactor <= 1.0, "dutyFactor must be in (0, 1]");
    require(cbrRateBps >= 0.0, "cbrRateBps must be >= 0");
    require(cluster.numClusters >= 1, "numClusters must be >= 1");
    require(cluster.maxDelayNs >= 0.0, "maxDelayNs must be >= 0");
    require(link.blerTarget > 0.0 && link.blerTarget < 1.0, "blerTarget must be in (0, 1)");
    require(link.blerSlopeDb > 0.0, "blerSlopeDb must be > 0");
    require(link.betaScale > 0.0, "eesmBetaScale must be > 0");
    require(uePorts() <= static_cast<int>(kMaxRxPorts), "at most 8 UE ports");
    try {
      pm.validate();
      validatePortConfig(gnbPortConfig(), gnbGeometry());
      validatePortConfig(uePortConfig(), ueGeometry(ueBearingDeg));
      if (gnbPorts() > 2 && !gnb.dualPolarized)
        throw PortConfigError("gNB codebooks above 2 ports need a dual-polarized array");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parseNumber(const std::string& key, const std::string& v, int line) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': expected a " + (std::is_integral_v<T> ? "integer" : "number") +
                          ", got '" + v + "'",
                      line);
  return out;
}

inline bool parseBool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'", line);
}

template <typename T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else {
    std::ostringstream os;
    os << v;
    return os.str();
  }
}

}  // namespace detail

/// Every settable key, its setter and a printer for the current value.
class ConfigKeys {
 public:
  using Setter = std::function<void(ScenarioConfig&, const std::string&, int)>;
  using Getter = std::function<std::string(const ScenarioConfig&)>;

  static const ConfigKeys& instance() {
    static const ConfigKeys keys;
    return keys;
  }

  bool contains(const std::string& k) const { return entries_.count(k) > 0; }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& [k, _] : entries_) n.push_back(k);
    return n;
  }
  std::string joinedNames() const {
    std::string s;
    for (const auto& [k, _] : entries_) s += (s.empty() ? "" : ", ") + k;
    return s;
  }
  void set(ScenarioConfig& c, const std::string& key, const std::string& value, int line = 0) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown key '" + key + "'; valid keys: " + joinedNames(), line);
    it->second.first(c, value, line);
  }
  std::string get(const ScenarioConfig& c, const std::string& key) const { return entries_.at(key).second(c); }

 private:
  template <typename T, typename F>
  void add(const std::string& name, F field) {
    entries_[name] = {[name, field](ScenarioConfig& c, const std::string& v, int line) {
                        T& ref = field(c);
                        if constexpr (std::is_same_v<T, bool>)
                          ref = detail::parseBool(name, v, line);
                        else
                          ref = detail::parseNumber<T>(name, v, line);
                      },
                      [field](const ScenarioConfig& c) { return detail::show(field(const_cast<ScenarioConfig&>(c))); }};
  }

  ConfigKeys() {
#define NRMIMO_KEY(T, name, expr) add<T>(name, [](ScenarioConfig& c) -> T& { return expr; })
    NRMIMO_KEY(std::uint64_t, "seed", c.seed);
    NRMIMO_KEY(double, "distanceM", c.distanceM);
    NRMIMO_KEY(double, "simDurationMs", c.simDurationMs);
    NRMIMO_KEY(double, "carrierFrequencyHz", c.carrierFrequencyHz);
    NRMIMO_KEY(int, "numRb", c.numRb);
    NRMIMO_KEY(double, "rbBandwidthHz", c.rbBandwidthHz);
    NRMIMO_KEY(int, "symbolsPerSlot", c.symbolsPerSlot);
    NRMIMO_KEY(double, "gnbTxPowerDbm", c.gnbTxPowerDbm);
    NRMIMO_KEY(double, "gnbNoiseFigureDb", c.gnbNoiseFigureDb);
    NRMIMO_KEY(double, "ueNoiseFigureDb", c.ueNoiseFigureDb);
    NRMIMO_KEY(double, "gnbHeightM", c.gnbHeightM);
    NRMIMO_KEY(double, "ueHeightM", c.ueHeightM);
    NRMIMO_KEY(double, "gnbBearingDeg", c.gnbBearingDeg);
    NRMIMO_KEY(double, "ueBearingDeg", c.ueBearingDeg);
    NRMIMO_KEY(double, "gnbElementGainDbi", c.gnbElementGainDbi);
    NRMIMO_KEY(double, "ueElementGainDbi", c.ueElementGainDbi);
    NRMIMO_KEY(double, "elementSpacingH", c.elementSpacingH);
    NRMIMO_KEY(double, "elementSpacingV", c.elementSpacingV);
    NRMIMO_KEY(int, "gnbRows", c.gnb.rows);
    NRMIMO_KEY(int, "gnbCols", c.gnb.cols);
    NRMIMO_KEY(bool, "gnbDualPolarized", c.gnb.dualPolarized);
    NRMIMO_KEY(int, "gnbNh", c.gnb.nH);
    NRMIMO_KEY(int, "gnbNv", c.gnb.nV);
    NRMIMO_KEY(int, "ueRows", c.ue.rows);
    NRMIMO_KEY(int, "ueCols", c.ue.cols);
    NRMIMO_KEY(bool, "ueDualPolarized", c.ue.dualPolarized);
    NRMIMO_KEY(int, "ueNh", c.ue.nH);
    NRMIMO_KEY(int, "ueNv", c.ue.nV);
    NRMIMO_KEY(double, "channelUpdatePeriodMs", c.channelUpdatePeriodMs);
    NRMIMO_KEY(double, "losUpdatePeriodMs", c.losUpdatePeriodMs);
    NRMIMO_KEY(int, "k1Slots", c.k1Slots);
    NRMIMO_KEY(bool, "mimoFeedback", c.mimoFeedback);
    NRMIMO_KEY(int, "rankLimit", c.pm.rankLimit);
    NRMIMO_KEY(double, "wbPmiUpdateIntervalMs", c.pm.wbUpdateIntervalMs);
    NRMIMO_KEY(double, "sbPmiUpdateIntervalMs", c.pm.sbUpdateIntervalMs);
    NRMIMO_KEY(int, "subbandSizeRb", c.pm.subbandSizeRb);
    NRMIMO_KEY(bool, "interference", c.interference);
    NRMIMO_KEY(double, "interfererGnbX", c.interfererGnbX);
    NRMIMO_KEY(double, "interfererUeX", c.interfererUeX);
    NRMIMO_KEY(double, "dutyFactor", c.dutyFactor);
    NRMIMO_KEY(double, "cbrRateBps", c.cbrRateBps);
    NRMIMO_KEY(int, "numClusters", c.cluster.numClusters);
    NRMIMO_KEY(double, "clusterDecayDb", c.cluster.decayDbPerCluster);
    NRMIMO_KEY(double, "azimuthSpreadDeg", c.cluster.azimuthSpreadDeg);
    NRMIMO_KEY(double, "zenithSpreadDeg", c.cluster.zenithSpreadDeg);
    NRMIMO_KEY(double, "maxDelayNs", c.cluster.maxDelayNs);
    NRMIMO_KEY(double, "riceanKDb", c.cluster.riceanKDb);
    NRMIMO_KEY(double, "xprDb", c.cluster.xprDb);
    NRMIMO_KEY(double, "implementationLossDb", c.link.implementationLossDb);
    NRMIMO_KEY(double, "blerSlopeDb", c.link.blerSlopeDb);
    NRMIMO_KEY(double, "blerTarget", c.link.blerTarget);
    NRMIMO_KEY(double, "eesmBetaScale", c.link.betaScale);
#undef NRMIMO_KEY
  }

  std::map<std::string, std::pair<Setter, Getter>> entries_;
};

struct ConfigOverride {
  std::string key;
  std::string value;
  int line = 0;
};
using ConfigOverrides = std::vector<ConfigOverride>;

/// Parses `key = value` lines. '#' starts a comment. Keys are checked here,
/// values are type-checked against a default config.
inline ConfigOverrides parseConfigText(const std::string& text) {
  ConfigOverrides out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const auto& keys = ConfigKeys::instance();
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + body + "'", line);
    ConfigOverride o{detail::trim(std::string_view(body).substr(0, eq)),
                     detail::trim(std::string_view(body).substr(eq + 1)), line};
    if (o.key.empty()) throw ConfigError("missing key before '='", line);
    if (o.value.empty()) throw ConfigError("missing value for key '" + o.key + "'", line);
    ScenarioConfig probe;
    keys.set(probe, o.key, o.value, line);
    out.push_back(std::move(o));
  }
  return out;
}

inline ConfigOverrides parseConfig(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parseConfigText(ss.str());
}

inline void applyOverrides(ScenarioConfig& cfg, const ConfigOverrides& o) {
  for (const auto& kv : o) ConfigKeys::instance().set(cfg, kv.key, kv.value, kv.line);
}

/// The full config as `key = value` lines, sorted by key.
inline std::string formatConfig(const ScenarioConfig& cfg) {
  std::string s;
  const auto& keys = ConfigKeys::instance();
  for (const auto& k : keys.names()) s += k + " = " + keys.get(cfg, k) + "\n";
  return s;
}

}  // namespace nrmimo
