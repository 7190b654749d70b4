/**
 * @file campaign.hpp
 * @brief Campaign definitions (variants per campaign), the cell runner with
 * a worker pool, aggregation and the CSV / plot-script output.
 *
 * Config layering for a cell: defaults, campaign base, user overrides,
 * variant, then the sweep point (distance, seed).
 */
#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nrmimo/scenario.hpp"
#include "nrmimo/simulator.hpp"
#include "nrmimo/stats.hpp"

namespace nrmimo {

struct Variant {
  std::string name;
  std::function<void(ScenarioConfig&)> apply;
};

inline constexpr DeviceArrayConfig kConf1Gnb{2, 4, false, 2, 1};
inline constexpr DeviceArrayConfig kConf1Ue{2, 2, false, 2, 1};
inline constexpr DeviceArrayConfig kConf2aGnb{4, 2, true, 2, 2};
inline constexpr DeviceArrayConfig kConf2bGnb{8, 4, true, 4, 2};
inline constexpr DeviceArrayConfig kConf2Ue{1, 2, true, 2, 1};
inline constexpr DeviceArrayConfig kConf3Gnb8{8, 4, true, 2, 2};
inline constexpr DeviceArrayConfig kConf3Gnb16{8, 4, true, 4, 2};
inline constexpr DeviceArrayConfig kConf3Gnb32{8, 4, true, 4, 4};

inline bool isValidCampaign(int id) { return id >= 1 && id <= 5; }

/// Campaign base on top of the defaults.
inline ScenarioConfig campaignBase(int id) {
  if (!isValidCampaign(id)) throw ConfigError("campaign must be in 1..5, got " + std::to_string(id));
  ScenarioConfig c;
  c.campaign = id;
  switch (id) {
    case 1:
      c.gnb = kConf1Gnb;
      c.ue = kConf1Ue;
      c.pm.rankLimit = 2;
      break;
    case 2:
      c.gnb = kConf2aGnb;
      c.ue = kConf2Ue;
      break;
    case 3:
      c.gnb = kConf3Gnb16;
      c.ue = kConf2Ue;
      c.pm.rankLimit = 4;
      break;
    case 4:
      c.gnb = kConf2bGnb;
      c.ue = kConf2Ue;
      c.pm.rankLimit = 4;
      break;
    case 5:
      c.gnb = kConf3Gnb16;
      c.ue = kConf2Ue;
      c.pm.rankLimit = 4;
      break;
  }
  return c;
}

inline std::vector<Variant> campaignVariants(int id) {
  std::vector<Variant> v;
  auto noFb = [](ScenarioConfig& c) {
    c.mimoFeedback = false;
    c.pm.rankLimit = 1;
  };
  auto fb = [](int ri) {
    return [ri](ScenarioConfig& c) {
      c.mimoFeedback = true;
      c.pm.rankLimit = ri;
    };
  };
  switch (id) {
    case 1:
      v = {{"noFb", noFb}, {"fb-maxRi1", fb(1)}, {"fb-maxRi2", fb(2)}};
      break;
    case 2:
      for (const auto& [tag, gnb] : {std::pair{"conf2a", kConf2aGnb}, std::pair{"conf2b", kConf2bGnb}}) {
        const DeviceArrayConfig g = gnb;
        v.push_back({std::string(tag) + "-noFb", [g, noFb](ScenarioConfig& c) {
                       c.gnb = g;
                       noFb(c);
                     }});
        for (int ri = 1; ri <= 4; ++ri)
          v.push_back({std::string(tag) + "-fb-maxRi" + std::to_string(ri), [g, ri](ScenarioConfig& c) {
                         c.gnb = g;
                         c.mimoFeedback = true;
                         c.pm.rankLimit = ri;
                       }});
      }
      break;
    case 3:
      for (const auto& [tag, gnb] :
           {std::pair{"ports8", kConf3Gnb8}, std::pair{"ports16", kConf3Gnb16}, std::pair{"ports32", kConf3Gnb32}}) {
        const DeviceArrayConfig g = gnb;
        v.push_back({tag, [g](ScenarioConfig& c) {
                       c.gnb = g;
                       c.mimoFeedback = true;
                       c.pm.rankLimit = 4;
                     }});
      }
      break;
    case 4:
      for (const auto& [wb, sb] : {std::pair{10, 2}, std::pair{20, 2}, std::pair{20, 4}, std::pair{100, 100}}) {
        v.push_back({"wb" + std::to_string(wb) + "-sb" + std::to_string(sb), [wb, sb](ScenarioConfig& c) {
                       c.mimoFeedback = true;
                       c.pm.wbUpdateIntervalMs = wb;
                       c.pm.sbUpdateIntervalMs = sb;
                     }});
      }
      break;
    case 5:
      for (bool feedback : {false, true})
        for (bool intf : {false, true}) {
          v.push_back({std::string(feedback ? "fb" : "noFb") + (intf ? "-intf" : "-noIntf"),
                       [feedback, intf, noFb](ScenarioConfig& c) {
                         if (feedback) {
                           c.mimoFeedback = true;
                           c.pm.rankLimit = 4;
                         } else {
                           noFb(c);
                         }
                         c.interference = intf;
                       }});
        }
      break;
    default:
      throw ConfigError("campaign must be in 1..5, got " + std::to_string(id));
  }
  return v;
}

inline std::vector<double> defaultDistances() {
  std::vector<double> d;
  for (double x = 20; x <= 820; x += 100) d.push_back(x);
  return d;
}

inline std::vector<std::uint64_t> seedRange(std::uint64_t first, std::uint64_t last) {
  std::vector<std::uint64_t> s;
  for (auto k = first; k <= last; ++k) s.push_back(k);
  return s;
}

struct CampaignSpec {
  int campaignId = 1;
  std::vector<double> distancesM = defaultDistances();
  std::vector<std::uint64_t> seeds = seedRange(1, 10);
  ConfigOverrides overrides;
  std::string outputDir;  ///< empty: nothing written
  int jobs = 1;
  bool writeTraces = true;
  std::vector<std::string> onlyVariants;  ///< empty: all variants
};

struct RunRecord {
  std::string variant;
  double distanceM = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Metrics metrics;
};

struct AggregateRow {
  int campaign = 0;
  std::string variant;
  double distanceM = 0;
  double meanThroughputBps = 0;
  double ci95 = 0;
  double meanMcs = 0;
  double meanRank = 0;
  double meanExecSeconds = 0;
  double csiSearchCount = 0;
  double meanCsiSearchSeconds = 0;
  int runs = 0;
};

struct CampaignResult {
  int campaignId = 0;
  std::vector<std::string> variants;
  std::vector<RunRecord> runs;
  std::vector<AggregateRow> aggregate;
  int exitStatus = 0;

  /// Metric values of every ok run of (variant, distance), in seed order.
  std::vector<double> values(const std::string& variant, double distanceM,
                             const std::function<double(const Metrics&)>& f) const {
    std::vector<double> out;
    for (const auto& r : runs)
      if (r.ok && r.variant == variant && r.distanceM == distanceM) out.push_back(f(r.metrics));
    return out;
  }
  const AggregateRow* row(const std::string& variant, double distanceM) const {
    for (const auto& a : aggregate)
      if (a.variant == variant && a.distanceM == distanceM) return &a;
    return nullptr;
  }
};

inline std::vector<AggregateRow> aggregateRuns(int campaignId, const std::vector<std::string>& variants,
                                               const std::vector<double>& distances,
                                               const std::vector<RunRecord>& runs) {
  std::vector<AggregateRow> rows;
  for (const auto& v : variants)
    for (double d : distances) {
      std::vector<double> thr, mcs, rank, exec, csi, csiSec;
      for (const auto& r : runs) {
        if (!r.ok || r.variant != v || r.distanceM != d) continue;
        thr.push_back(r.metrics.throughputBps);
        mcs.push_back(r.metrics.avgMcs);
        rank.push_back(r.metrics.avgRank);
        exec.push_back(r.metrics.wallClockSeconds);
        csi.push_back(static_cast<double>(r.metrics.csiSearchCount));
        csiSec.push_back(r.metrics.csiSearchSeconds);
      }
      if (thr.empty()) continue;
      rows.push_back({campaignId, v, d, stats::mean(thr), stats::ci95(thr), stats::mean(mcs), stats::mean(rank),
                      stats::mean(exec), stats::mean(csi), stats::mean(csiSec), static_cast<int>(thr.size())});
    }
  return rows;
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

inline std::string distanceTag(double d) { return fmt("%g", d); }

inline void writeFile(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace detail

inline std::string aggregateCsvHeader() {
  return "campaign,variant,distanceM,meanThroughputBps,ci95,meanMcs,meanRank,meanExecSeconds,csiSearchCount";
}

inline std::string aggregateCsv(const std::vector<AggregateRow>& rows) {
  std::string s = aggregateCsvHeader() + "\n";
  for (const auto& r : rows) {
    s += std::to_string(r.campaign) + "," + r.variant + "," + detail::distanceTag(r.distanceM) + "," +
         detail::fmt("%.3f", r.meanThroughputBps) + "," + detail::fmt("%.3f", r.ci95) + "," +
         detail::fmt("%.4f", r.meanMcs) + "," + detail::fmt("%.4f", r.meanRank) + "," +
         detail::fmt("%.6f", r.meanExecSeconds) + "," + detail::fmt("%.2f", r.csiSearchCount) + "\n";
  }
  return s;
}

inline std::string runsCsv(int campaignId, const std::vector<RunRecord>& runs) {
  std::string s =
      "campaign,variant,distanceM,seed,throughputBps,avgMcs,avgRank,tbCount,tbErrorCount,csiSearchCount,"
      "wbSearchCount,sbRefreshCount,csiSearchSeconds,wallClockSeconds\n";
  for (const auto& r : runs) {
    if (!r.ok) continue;
    const auto& m = r.metrics;
    s += std::to_string(campaignId) + "," + r.variant + "," + detail::distanceTag(r.distanceM) + "," +
         std::to_string(r.seed) + "," + detail::fmt("%.3f", m.throughputBps) + "," + detail::fmt("%.4f", m.avgMcs) +
         "," + detail::fmt("%.4f", m.avgRank) + "," + std::to_string(m.tbCount) + "," +
         std::to_string(m.tbErrorCount) + "," + std::to_string(m.csiSearchCount) + "," +
         std::to_string(m.wbSearchCount) + "," + std::to_string(m.sbRefreshCount) + "," +
         detail::fmt("%.6f", m.csiSearchSeconds) + "," + detail::fmt("%.6f", m.wallClockSeconds) + "\n";
  }
  return s;
}

/// gnuplot script: throughput, MCS, rank and exec time against distance.
inline std::string plotScript(int campaignId, const std::vector<std::string>& variants, const std::string& csvName) {
  std::string s;
  s += "# gnuplot " + csvName + "\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 1400,1000\n";
  s += "set output 'campaign" + std::to_string(campaignId) + ".png'\n";
  s += "set multiplot layout 2,2 title 'campaign " + std::to_string(campaignId) + "'\n";
  s += "set key bottom left\nset xlabel 'distance [m]'\nset grid\n";
  const std::vector<std::pair<std::string, std::string>> panels = {
      {"throughput [Mbps]", "($4/1e6)"}, {"mean MCS", "($6)"}, {"mean rank", "($7)"}, {"exec time [s]", "($8)"}};
  for (const auto& [label, y] : panels) {
    s += "set ylabel '" + label + "'\nplot ";
    for (std::size_t i = 0; i < variants.size(); ++i) {
      s += std::string(i ? ", \\\n     " : "") + "'" + csvName + "' every ::1 using (strcol(2) eq '" + variants[i] +
           "' ? $3 : 1/0):" + y + " with linespoints title '" + variants[i] + "'";
    }
    s += "\n";
  }
  s += "unset multiplot\n";
  return s;
}

/// Effective config of one cell.
inline ScenarioConfig cellConfig(int campaignId, const ConfigOverrides& overrides, const Variant& v, double distanceM,
                                 std::uint64_t seed) {
  auto cfg = campaignBase(campaignId);
  applyOverrides(cfg, overrides);
  v.apply(cfg);
  cfg.distanceM = distanceM;
  cfg.seed = seed;
  return cfg;
}

inline CampaignResult runCampaign(const CampaignSpec& spec) {
  namespace fs = std::filesystem;
  if (!isValidCampaign(spec.campaignId)) throw ConfigError("campaign must be in 1..5");
  if (spec.distancesM.empty()) throw ConfigError("no distances given");
  if (spec.seeds.empty()) throw ConfigError("no seeds given");
  for (double d : spec.distancesM)
    if (!(d > 0)) throw ConfigError("distances must be > 0");

  auto variants = campaignVariants(spec.campaignId);
  if (!spec.onlyVariants.empty()) {
    std::vector<Variant> keep;
    for (const auto& name : spec.onlyVariants) {
      auto it = std::find_if(variants.begin(), variants.end(), [&](const Variant& v) { return v.name == name; });
      if (it == variants.end()) throw ConfigError("unknown variant '" + name + "'");
      keep.push_back(*it);
    }
    variants = keep;
  }

  // fail fast on bad overrides and before any work
  {
    auto probe = campaignBase(spec.campaignId);
    applyOverrides(probe, spec.overrides);
  }

  const bool writing = !spec.outputDir.empty();
  const fs::path out(spec.outputDir);
  const std::string prefix = "campaign" + std::to_string(spec.campaignId);
  if (writing) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw std::runtime_error("cannot create output directory " + out.string());
    const auto probe = out / ".write_probe";
    {
      std::ofstream f(probe);
      if (!f) throw std::runtime_error("output directory is not writable: " + out.string());
    }
    fs::remove(probe, ec);
    auto base = campaignBase(spec.campaignId);
    applyOverrides(base, spec.overrides);
    detail::writeFile(out / (prefix + "_config.txt"), formatConfig(base));
  }

  // one shared codebook set per variant
  std::vector<std::shared_ptr<const CodebookSet>> books(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    try {
      books[i] = makeCodebookSet(cellConfig(spec.campaignId, spec.overrides, variants[i], 1.0, 1));
    } catch (const std::exception&) {
      books[i] = nullptr;  // reported per cell below
    }
  }

  struct Cell {
    std::size_t variant;
    double distance;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (double d : spec.distancesM)
      for (auto s : spec.seeds) cells.push_back({v, d, s});

  CampaignResult res;
  res.campaignId = spec.campaignId;
  for (const auto& v : variants) res.variants.push_back(v.name);
  res.runs.resize(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& c = cells[i];
      auto& rec = res.runs[i];
      rec.variant = variants[c.variant].name;
      rec.distanceM = c.distance;
      rec.seed = c.seed;
      try {
        const auto cfg = cellConfig(spec.campaignId, spec.overrides, variants[c.variant], c.distance, c.seed);
        SimulationState st;
        rec.metrics = simulate(cfg, books[c.variant], (writing && spec.writeTraces) ? &st : nullptr);
        if (writing && spec.writeTraces) {
          const auto dir = out / (prefix + "_traces") / rec.variant;
          fs::create_directories(dir);
          const std::string stem = "d" + detail::distanceTag(c.distance) + "_s" + std::to_string(c.seed);
          detail::writeFile(dir / (stem + "_tb.csv"), tbTraceHeader() + "\n" + st.tbTrace);
          detail::writeFile(dir / (stem + "_fb.csv"), feedbackCsvHeader() + "\n" + st.feedbackTrace);
        }
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
    }
  };
  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  res.aggregate = aggregateRuns(spec.campaignId, res.variants, spec.distancesM, res.runs);
  const bool anyFailed = std::any_of(res.runs.begin(), res.runs.end(), [](const RunRecord& r) { return !r.ok; });
  res.exitStatus = anyFailed ? 1 : 0;

  if (writing) {
    detail::writeFile(out / (prefix + "_aggregate.csv"), aggregateCsv(res.aggregate));
    detail::writeFile(out / (prefix + "_runs.csv"), runsCsv(spec.campaignId, res.runs));
    detail::writeFile(out / (prefix + "_plot.gp"), plotScript(spec.campaignId, res.variants, prefix + "_aggregate.csv"));
    std::string manifest = "variant,distanceM,seed,status,message\n";
    for (const auto& r : res.runs) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      manifest += r.variant + "," + detail::distanceTag(r.distanceM) + "," + std::to_string(r.seed) + "," +
                  (r.ok ? "ok" : "failed") + "," + msg + "\n";
    }
    detail::writeFile(out / (prefix + "_manifest.csv"), manifest);
  }
  return res;
}

}  // namespace nrmimo
