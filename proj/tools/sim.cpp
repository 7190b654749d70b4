/**
 * @file sim.cpp
 * @brief `sim` command line: campaign runner, matrix benchmark, codebook dump.
 */
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bench/benchmark.hpp"
#include "nrmimo/nrmimo.hpp"

namespace {

constexpr const char* kOutDirEnv = "NRMIMO_OUT_DIR";

std::vector<std::string> splitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double toDouble(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size()) throw CLI::ValidationError(what, "not a number: '" + s + "'");
  return v;
}

std::uint64_t toUint(const std::string& s, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') throw CLI::ValidationError(what, "not a seed: '" + s + "'");
  return v;
}

/// "a..b", "a" or "a,b,c".
std::vector<std::uint64_t> parseSeeds(const std::string& s) {
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const auto a = toUint(s.substr(0, dots), "--seeds"), b = toUint(s.substr(dots + 2), "--seeds");
    if (b < a) throw CLI::ValidationError("--seeds", "empty range " + s);
    return nrmimo::seedRange(a, b);
  }
  std::vector<std::uint64_t> out;
  for (const auto& x : splitCsv(s)) out.push_back(toUint(x, "--seeds"));
  return out;
}

int cmdRun(int campaign, const std::string& config, std::string out, const std::string& seeds,
           const std::string& distances, int jobs, bool noTraces, const std::string& variants) {
  nrmimo::CampaignSpec spec;
  spec.campaignId = campaign;
  if (!config.empty()) spec.overrides = nrmimo::parseConfig(config);
  if (out.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    out = env && *env ? env : "results";
  }
  spec.outputDir = out;
  if (!seeds.empty()) spec.seeds = parseSeeds(seeds);
  if (!distances.empty()) {
    spec.distancesM.clear();
    for (const auto& d : splitCsv(distances)) spec.distancesM.push_back(toDouble(d, "--distances"));
  }
  spec.jobs = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  spec.writeTraces = !noTraces;
  if (!variants.empty()) spec.onlyVariants = splitCsv(variants);

  const auto res = nrmimo::runCampaign(spec);
  std::cout << nrmimo::aggregateCsv(res.aggregate);
  long failed = 0;
  for (const auto& r : res.runs)
    if (!r.ok) {
      ++failed;
      std::cerr << "failed: " << r.variant << " d=" << r.distanceM << " seed=" << r.seed << ": " << r.error << "\n";
    }
  std::cerr << res.runs.size() - failed << "/" << res.runs.size() << " cells ok, output in " << out << "\n";
  return res.exitStatus;
}

int cmdBench(const std::string& depths, long reps) {
  std::vector<std::size_t> d;
  for (const auto& x : splitCsv(depths)) {
    const double v = toDouble(x, "--depths");
    if (v < 1) throw CLI::ValidationError("--depths", "depth must be >= 1");
    d.push_back(static_cast<std::size_t>(v));
  }
  std::cout << nrmimo::bench::benchCsv(nrmimo::bench::runBenchmark(d, reps));
  return 0;
}

int cmdCodebookDump(int ports, int rank, int n1, int n2) {
  std::unique_ptr<nrmimo::Codebook> cb;
  if (ports <= 2) {
    cb = nrmimo::makeTwoPort(ports, rank);
  } else {
    if (n1 == 0 || n2 == 0) {
      // first single-panel layout with this port count
      for (const auto& [h, v] : nrmimo::kSupportedPortLayouts)
        if (2 * h * v == ports) {
          n1 = h;
          n2 = v;
          break;
        }
    }
    if (2 * n1 * n2 != ports) throw nrmimo::CodebookError("no (n1,n2) layout for " + std::to_string(ports) + " ports");
    cb = nrmimo::makeTypeOneSp(nrmimo::CodebookParams::singlePanel(n1, n2, rank));
  }
  std::cout << "# ports " << cb->numPorts() << " rank " << cb->rank() << " numI1 " << cb->numI1() << " numI2 "
            << cb->numI2() << "\n";
  for (int i1 = 0; i1 < cb->numI1(); ++i1)
    for (int i2 = 0; i2 < cb->numI2(); ++i2)
      std::cout << "\n# rank " << rank << " i1 " << i1 << " i2 " << i2 << "\n" << nrmimo::dump(cb->precoderAt(i1, i2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop NR SU-MIMO link simulator"};
  app.require_subcommand(1);

  int campaign = 0, jobs = 0;
  std::string config, out, seeds, distances, variants;
  bool noTraces = false;
  auto* run = app.add_subcommand("run", "run a campaign");
  run->add_option("--campaign", campaign, "campaign 1..5")->required()->check(CLI::Range(1, 5));
  run->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--out", out, std::string("output directory (default $") + kOutDirEnv + " or ./results)");
  run->add_option("--seeds", seeds, "a..b or a,b,c (default 1..10)");
  run->add_option("--distances", distances, "comma separated meters (default 20..820 step 100)");
  run->add_option("--jobs", jobs, "worker threads (default: cores)");
  run->add_option("--variants", variants, "comma separated subset of the campaign variants");
  run->add_flag("--no-traces", noTraces, "skip per-run trace CSVs");

  std::string depths = "10,50,100,200,300";
  long reps = 100000;
  auto* bench = app.add_subcommand("bench", "contiguous vs nested page multiply benchmark");
  bench->add_option("--depths", depths, "page depths");
  bench->add_option("--reps", reps, "multiplications per depth")->check(CLI::PositiveNumber);

  int ports = 2, rank = 1, n1 = 0, n2 = 0;
  auto* cbCmd = app.add_subcommand("codebook", "codebook tools");
  cbCmd->require_subcommand(1);
  auto* dumpCmd = cbCmd->add_subcommand("dump", "print every precoder of one codebook");
  dumpCmd->add_option("--ports", ports, "port count")->required();
  dumpCmd->add_option("--rank", rank, "rank 1..4")->required();
  dumpCmd->add_option("--n1", n1, "horizontal ports per polarization");
  dumpCmd->add_option("--n2", n2, "vertical ports per polarization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmdRun(campaign, config, out, seeds, distances, jobs, noTraces, variants);
    if (*bench) return cmdBench(depths, reps);
    if (*dumpCmd) return cmdCodebookDump(ports, rank, n1, n2);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
