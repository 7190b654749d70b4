/**
 * @file test_cli.cpp
 * @brief Config parsing, campaign output files, golden aggregate and the
 * `sim` binary end to end.
 */
#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "nrmimo/campaign.hpp"

using namespace nrmimo;
namespace fs = std::filesystem;

namespace {

fs::path scratchDir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nrmimo_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

struct Proc {
  int status = -1;
  std::string out;
};

Proc runShell(const std::string& cmd) {
  Proc r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// meanExecSeconds is wall clock; blank it before comparing
std::string maskExecColumn(const std::string& csv) {
  std::string out;
  for (const auto& l : lines(csv)) {
    std::vector<std::string> cells;
    std::istringstream ls(l);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (cells.size() > 7) cells[7] = "*";
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  }
  return out;
}

CampaignSpec microSpec(const fs::path& out) {
  CampaignSpec s;
  s.campaignId = 1;
  s.distancesM = {100, 300};
  s.seeds = {1, 2};
  s.outputDir = out.string();
  return s;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto o = parseConfigText("");
  EXPECT_TRUE(o.empty());
  auto a = campaignBase(1);
  applyOverrides(a, o);
  EXPECT_EQ(formatConfig(a), formatConfig(campaignBase(1)));
}

TEST(Config, ValueApplied) {
  auto c = campaignBase(3);
  applyOverrides(c, parseConfigText("rankLimit = 4\n"));
  EXPECT_EQ(c.pm.rankLimit, 4);
  applyOverrides(c, parseConfigText("  rankLimit=2   # trailing comment\n\n# whole line\nsimDurationMs = 250\n"));
  EXPECT_EQ(c.pm.rankLimit, 2);
  EXPECT_EQ(c.simDurationMs, 250);
}

TEST(Config, BadValueReportsLine) {
  try {
    parseConfigText("# header\nseed = 3\nrankLimit = banana\n");
    FAIL() << "no throw";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("rankLimit"), std::string::npos);
  }
}

TEST(Config, UnknownKeyListsValidKeys) {
  try {
    parseConfigText("rankLimt = 2\n");
    FAIL() << "no throw";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(msg.find("rankLimt"), std::string::npos);
    for (const auto& k : ConfigKeys::instance().names()) EXPECT_NE(msg.find(k), std::string::npos) << k;
  }
}

TEST(Config, MalformedLines) {
  EXPECT_THROW(parseConfigText("rankLimit 4\n"), ConfigError);
  EXPECT_THROW(parseConfigText("= 4\n"), ConfigError);
  EXPECT_THROW(parseConfigText("rankLimit =\n"), ConfigError);
  EXPECT_THROW(parseConfig("/nonexistent/dir/cfg.txt"), ConfigError);
}

TEST(Config, FormatRoundTrips) {
  auto c = campaignBase(4);
  c.pm.wbUpdateIntervalMs = 20;
  c.mimoFeedback = false;
  auto d = campaignBase(1);
  applyOverrides(d, parseConfigText(formatConfig(c)));
  EXPECT_EQ(formatConfig(d), formatConfig(c));
}

TEST(Variants, Names) {
  auto names = [](int id) {
    std::vector<std::string> n;
    for (const auto& v : campaignVariants(id)) n.push_back(v.name);
    return n;
  };
  EXPECT_EQ(names(1), (std::vector<std::string>{"noFb", "fb-maxRi1", "fb-maxRi2"}));
  EXPECT_EQ(names(3), (std::vector<std::string>{"ports8", "ports16", "ports32"}));
  const auto c4 = names(4);
  EXPECT_NE(std::find(c4.begin(), c4.end(), "wb10-sb2"), c4.end());
  EXPECT_NE(std::find(c4.begin(), c4.end(), "wb100-sb100"), c4.end());
  EXPECT_EQ(names(5).size(), 4u);
  EXPECT_THROW(campaignVariants(0), ConfigError);
  EXPECT_THROW(campaignVariants(6), ConfigError);
}

TEST(Campaign, WritesAllFiles) {
  const auto dir = scratchDir("files");
  const auto res = runCampaign(microSpec(dir));
  EXPECT_EQ(res.exitStatus, 0);
  EXPECT_EQ(res.runs.size(), 3u * 2 * 2);
  for (const char* f : {"_config.txt", "_aggregate.csv", "_runs.csv", "_plot.gp", "_manifest.csv"})
    EXPECT_TRUE(fs::exists(dir / (std::string("campaign1") + f))) << f;
  EXPECT_TRUE(fs::exists(dir / "campaign1_traces" / "fb-maxRi2" / "d300_s2_tb.csv"));
  EXPECT_TRUE(fs::exists(dir / "campaign1_traces" / "noFb" / "d100_s1_fb.csv"));

  const auto agg = lines(slurp(dir / "campaign1_aggregate.csv"));
  ASSERT_EQ(agg.size(), 1u + 3 * 2);
  EXPECT_EQ(agg[0], aggregateCsvHeader());
  const auto manifest = lines(slurp(dir / "campaign1_manifest.csv"));
  ASSERT_EQ(manifest.size(), 1u + 12);
  EXPECT_EQ(manifest[0], "variant,distanceM,seed,status,message");
  for (std::size_t i = 1; i < manifest.size(); ++i) EXPECT_NE(manifest[i].find(",ok,"), std::string::npos);
  EXPECT_EQ(lines(slurp(dir / "campaign1_runs.csv")).size(), 13u);
  EXPECT_EQ(lines(slurp(dir / "campaign1_traces" / "noFb" / "d100_s1_tb.csv")).size(), 101u);
  fs::remove_all(dir);
}

TEST(Campaign, FailedCellsSetExitStatus) {
  auto spec = microSpec(scratchDir("fail"));
  spec.distancesM = {100};
  spec.seeds = {1};
  spec.writeTraces = false;
  // unsupported gNB layout: every cell fails but the campaign completes
  spec.overrides = parseConfigText("gnbNh = 3\n");
  const auto res = runCampaign(spec);
  EXPECT_EQ(res.exitStatus, 1);
  EXPECT_TRUE(res.aggregate.empty());
  const auto manifest = slurp(fs::path(spec.outputDir) / "campaign1_manifest.csv");
  EXPECT_NE(manifest.find(",failed,"), std::string::npos);
  fs::remove_all(spec.outputDir);
}

TEST(Campaign, RejectsBadSpec) {
  CampaignSpec s;
  s.campaignId = 7;
  EXPECT_THROW(runCampaign(s), ConfigError);
  s.campaignId = 1;
  s.distancesM = {0};
  EXPECT_THROW(runCampaign(s), ConfigError);
  s.distancesM = {10};
  s.onlyVariants = {"nope"};
  EXPECT_THROW(runCampaign(s), ConfigError);
}

TEST(Campaign, UnwritableOutputThrows) {
  auto s = microSpec("/proc/nrmimo_cannot_write_here");
  EXPECT_THROW(runCampaign(s), std::runtime_error);
}

TEST(Campaign, JobsDoNotChangeResults) {
  auto a = microSpec("");
  a.seeds = {3};
  auto b = a;
  b.jobs = 3;
  const auto ra = runCampaign(a), rb = runCampaign(b);
  ASSERT_EQ(ra.runs.size(), rb.runs.size());
  for (std::size_t i = 0; i < ra.runs.size(); ++i) {
    EXPECT_EQ(ra.runs[i].metrics.deliveredBits, rb.runs[i].metrics.deliveredBits);
    EXPECT_EQ(ra.runs[i].metrics.avgMcs, rb.runs[i].metrics.avgMcs);
  }
}

TEST(Campaign, GoldenAggregate) {
  const fs::path golden = fs::path(NRMIMO_SOURCE_DIR) / "tests" / "golden" / "campaign1_aggregate.csv";
  const auto dir = scratchDir("golden");
  auto spec = microSpec(dir);
  spec.writeTraces = false;
  runCampaign(spec);
  const auto got = maskExecColumn(slurp(dir / "campaign1_aggregate.csv"));
  fs::remove_all(dir);
  if (std::getenv("NRMIMO_UPDATE_GOLDEN")) {
    fs::create_directories(golden.parent_path());
    std::ofstream(golden, std::ios::binary) << got;
    GTEST_SKIP() << "golden rewritten";
  }
  ASSERT_TRUE(fs::exists(golden)) << "run with NRMIMO_UPDATE_GOLDEN=1 to create " << golden;
  EXPECT_EQ(got, slurp(golden));
}

TEST(Binary, CodebookDump) {
  const auto r = runShell(std::string(NRMIMO_SIM_BINARY) + " codebook dump --ports 2 --rank 1");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("numI1 1 numI2 4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# rank 1 i1 0 i2 3"), std::string::npos);
  const auto big = runShell(std::string(NRMIMO_SIM_BINARY) + " codebook dump --ports 32 --rank 4 | head -1");
  EXPECT_NE(big.out.find("# ports 32 rank 4"), std::string::npos) << big.out;
  EXPECT_NE(runShell(std::string(NRMIMO_SIM_BINARY) + " codebook dump --ports 6 --rank 1 2>&1").status, 0);
}

TEST(Binary, Bench) {
  const auto r = runShell(std::string(NRMIMO_SIM_BINARY) + " bench --depths 1,10 --reps 3");
  EXPECT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u) << r.out;
}

TEST(Binary, RunUsesEnvOutDir) {
  const auto dir = scratchDir("env");
  const fs::path cfg = dir.string() + ".cfg";
  std::ofstream(cfg) << "simDurationMs = 20\n";
  const auto r = runShell("NRMIMO_OUT_DIR=" + dir.string() + " " + NRMIMO_SIM_BINARY + " run --campaign 1 --config " +
                          cfg.string() + " --seeds 1..2 --distances 50 --jobs 1 2>/dev/null");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 4u) << r.out;
  EXPECT_TRUE(fs::exists(dir / "campaign1_aggregate.csv"));
  EXPECT_NE(slurp(dir / "campaign1_config.txt").find("simDurationMs = 20"), std::string::npos);
  fs::remove_all(dir);
  fs::remove(cfg);
}

TEST(Binary, InvalidKeyFails) {
  const auto dir = scratchDir("badkey");
  const fs::path cfg = dir.string() + ".cfg";
  std::ofstream(cfg) << "warpFactor = 9\n";
  const auto r = runShell(std::string(NRMIMO_SIM_BINARY) + " run --campaign 1 --config " + cfg.string() + " --out " +
                          dir.string() + " 2>&1");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("warpFactor"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir / "campaign1_aggregate.csv"));
  fs::remove(cfg);
  fs::remove_all(dir);
  EXPECT_NE(runShell(std::string(NRMIMO_SIM_BINARY) + " run --campaign 9 2>&1").status, 0);
}
