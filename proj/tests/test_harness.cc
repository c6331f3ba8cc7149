#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hears/harness/config.h"
#include "hears/harness/experiment.h"
#include "hears/harness/io.h"
#include "hears/harness/metrics.h"

namespace hears {
namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TempDir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hears_test_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

TEST(Cv, Examples) {
  EXPECT_EQ(CoefficientOfVariation(std::vector<double>{4, 4, 4}), 0.0);
  // population sigma of {90, 100, 110} is sqrt(200/3)
  EXPECT_NEAR(CoefficientOfVariation(std::vector<double>{90, 100, 110}), std::sqrt(200.0 / 3.0), 1e-12);
  const std::vector<double> v{3, 7, 8, 13};
  std::vector<double> w;
  for (double x : v) w.push_back(2.5 * x);
  EXPECT_NEAR(CoefficientOfVariation(v), CoefficientOfVariation(w), 1e-12);
  EXPECT_THROW(CoefficientOfVariation(std::vector<double>{}), ModelError);
  EXPECT_THROW(CoefficientOfVariation(std::vector<double>{-1, 1}), ModelError);
}

TEST(EpisodesToThreshold, Examples) {
  const std::vector<double> high(30, 5.0);
  EXPECT_EQ(EpisodesToThreshold(high, 1.0, 10), 9);
  EXPECT_FALSE(EpisodesToThreshold(high, 6.0, 10).has_value());
  // ramp r_i = i; window 4 mean at i is i - 1.5; first >= 20 at i = 22
  std::vector<double> ramp;
  for (int i = 0; i < 50; ++i) ramp.push_back(i);
  EXPECT_EQ(EpisodesToThreshold(ramp, 20.0, 4), 22);
  EXPECT_EQ(EpisodesToThreshold(ramp, 20.0, 1), 20);
  EXPECT_THROW(EpisodesToThreshold(ramp, 1.0, 0), ModelError);
}

TEST(Metrics, StableTailAndMedian) {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  EXPECT_EQ(StableTail(v).size(), 2u);
  EXPECT_DOUBLE_EQ(StableMean(v), 9.5);
  EXPECT_DOUBLE_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(ThresholdFromStable(100.0, 0.885), 88.5);
  EXPECT_DOUBLE_EQ(ThresholdFromStable(-100.0, 0.885), -111.5);
}

TEST(Presets, CitedRows) {
  const Preset ant = FindPreset("ant-table");
  EXPECT_EQ(ant.alpha_task, 0.005);
  EXPECT_EQ(ant.alpha_energy, 0.03);
  EXPECT_EQ(ant.lambda, 0.01);
  EXPECT_EQ(FindPreset("ant").lambda, 0.01);
  const Preset hop = FindPreset("hopper");
  EXPECT_EQ(hop.alpha_task, 0.5);
  EXPECT_EQ(hop.alpha_energy, 0.001);
  EXPECT_EQ(hop.lambda, 0.0005);
  const Preset v = FindPreset("vanilla");
  EXPECT_EQ(v.alpha_task + v.alpha_energy + v.lambda, 0.0);
  EXPECT_THROW(FindPreset("walker"), ModelError);
}

TEST(Ablation, GridRows) {
  ExperimentConfig base;
  base.ApplyPreset("ant");
  const auto grid = AblationGrid(base);
  ASSERT_EQ(grid.size(), 8u);
  const std::vector<std::string> names{"Vanilla", "Energy Only", "Task Only", "Regularization Only",
                                       "Without Regularization", "Without Energy", "Without Task", "Full"};
  std::set<std::tuple<double, double, double>> seen;
  for (size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(grid[i].name, names[i]);
    const auto& s = grid[i].config.shaping;
    seen.insert({s.alpha_task, s.alpha_energy, s.lambda});
  }
  EXPECT_EQ(seen.size(), 8u);
  const auto& v = grid[0].config.shaping;
  EXPECT_FALSE(v.enabled);
  EXPECT_EQ(v.alpha_task + v.alpha_energy + v.lambda, 0.0);
  const auto& wt = grid[6].config.shaping;
  EXPECT_EQ(wt.alpha_task, 0.0);
  EXPECT_EQ(wt.alpha_energy, 3e-2);
  EXPECT_EQ(wt.lambda, 1e-2);
  EXPECT_EQ(ToJson(grid[7].config), ToJson(base));
}

TEST(Config, JsonRoundTripAndOverrides) {
  ExperimentConfig c;
  c.env = "lander";
  c.ApplyPreset("lander");
  c.seeds = {1, 2};
  c.grid.walls = {{2, 3}};
  const ExperimentConfig d = ConfigFromJson(ToJson(c));
  EXPECT_EQ(ToJson(d), ToJson(c));
  EXPECT_EQ(ConfigHash(c), ConfigHash(d));
  ExperimentConfig e = c;
  e.out_dir = "elsewhere";
  e.threads = 4;
  EXPECT_EQ(ConfigHash(e), ConfigHash(c));
  e.shaping.lambda = 0.2;
  EXPECT_NE(ConfigHash(e), ConfigHash(c));
  EXPECT_EQ(ConfigHash(c).size(), 16u);

  const auto j = nlohmann::json::parse(R"({"preset": "hopper", "shaping": {"lambda": 0.25}})");
  const ExperimentConfig f = ConfigFromJson(j);
  EXPECT_EQ(f.shaping.alpha_task, 0.5);
  EXPECT_EQ(f.shaping.lambda, 0.25);
  EXPECT_THROW(ConfigFromJson(nlohmann::json::parse(R"({"bogus": 1})")), ModelError);
  EXPECT_THROW(ConfigFromJson(nlohmann::json::parse(R"({"shaping": {"lambda": -1}})")), ModelError);
}

TEST(Experiment, ZeroEpisodesGivesSkeleton) {
  ExperimentConfig c;
  c.env = "pendulum";
  c.episodes = 0;
  c.seeds = {1, 2};
  const ExperimentResult r = RunExperiment(c);
  EXPECT_FALSE(r.failed);
  ASSERT_EQ(r.runs.size(), 2u);
  for (const auto& run : r.runs) EXPECT_TRUE(run.record.episodes.empty());
  EXPECT_TRUE(r.summary.contains("aggregate"));
  EXPECT_TRUE(r.summary["aggregate"]["final_mean"].is_null());
  EXPECT_EQ(r.summary["per_seed"].size(), 2u);
}

ExperimentConfig SmallAc() {
  ExperimentConfig c;
  c.env = "pendulum";
  c.ApplyPreset("lander");
  c.episodes = 4;
  c.ac.max_steps = 60;
  c.ac.warmup_steps = 64;
  c.seeds = {11, 12, 13};
  return c;
}

TEST(Experiment, ByteIdenticalReruns) {
  ExperimentConfig c = SmallAc();
  const std::string a = TempDir("rerun_a"), b = TempDir("rerun_b");
  WriteExperiment(RunExperiment(c), a);
  c.threads = 3;  // merge order does not depend on completion order
  WriteExperiment(RunExperiment(c), b);
  for (const char* f : {"summary.json", "episodes.csv", "energy_trace.csv", "mpc_log.csv"}) {
    const std::string x = Slurp(a + "/" + f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, Slurp(b + "/" + f)) << f;
  }
}

TEST(Experiment, OutputsCarryStamp) {
  const ExperimentConfig c = SmallAc();
  const std::string dir = TempDir("stamp");
  const auto r = RunExperiment(c);
  WriteExperiment(r, dir);
  const std::string stamp = "config_hash=" + r.config_hash;
  for (const char* f : {"episodes.csv", "energy_trace.csv", "mpc_log.csv"}) {
    const std::string text = Slurp(dir + "/" + f);
    EXPECT_EQ(text.rfind("# " + stamp, 0), 0u) << f;
    EXPECT_NE(text.find("seed=11;12;13"), std::string::npos) << f;
    EXPECT_NE(text.find(kCodeVersion), std::string::npos) << f;
  }
  const auto j = nlohmann::json::parse(Slurp(dir + "/summary.json"));
  EXPECT_EQ(j["config_hash"], r.config_hash);
  EXPECT_EQ(j["code_version"], kCodeVersion);
}

// summary statistics recomputed independently from the raw csv
TEST(Experiment, SummaryRecomputableFromCsv) {
  const ExperimentConfig c = SmallAc();
  const std::string dir = TempDir("recompute");
  const auto r = RunExperiment(c);
  WriteExperiment(r, dir);
  const auto by_seed = ReadEpisodesCsv(dir + "/episodes.csv");
  ASSERT_EQ(by_seed.size(), 3u);
  std::vector<double> finals;
  for (const auto& [seed, eps] : by_seed) {
    const size_t n = eps.size();
    const size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(0.2 * n)));
    double s = 0.0;
    for (size_t i = n - k; i < n; ++i) s += eps[i].base_return;
    finals.push_back(s / k);
  }
  double mean = 0.0;
  for (double f : finals) mean += f / finals.size();
  double var = 0.0;
  for (double f : finals) var += (f - mean) * (f - mean) / finals.size();
  const auto& agg = r.summary["aggregate"];
  EXPECT_NEAR(agg["final_mean"].get<double>(), mean, 1e-9 * std::max(1.0, std::abs(mean)));
  EXPECT_NEAR(agg["final_std"].get<double>(), std::sqrt(var), 1e-9 * std::max(1.0, std::abs(mean)));
}

TEST(Experiment, FailureKeepsPartialResults) {
  ExperimentConfig c = SmallAc();
  c.env = "gridnav";
  c.learner = "tabular";
  c.grid.size = 4;
  c.episodes = 5;
  c.shaping.enabled = true;
  c.shaping.alpha_task = 1e9;  // diverges immediately
  c.seeds = {1, 2, 3};
  const auto r = RunExperiment(c);
  EXPECT_TRUE(r.failed);
  EXPECT_TRUE(r.runs[0].record.failed);
  EXPECT_FALSE(r.runs[0].record.error.empty());
  EXPECT_TRUE(r.runs[1].skipped);
  EXPECT_EQ(r.summary["runs"][1]["status"], "skipped");
}

TEST(GridNavComparison, EmitsAccelerationRatio) {
  GridNavOptions g;
  g.size = 8;
  g.max_steps = 400;
  ShapingSetup s;
  s.alpha_task = 1.0;
  QLearningConfig q;
  q.episodes = 200;
  q.epsilon_decay_episodes = 20;
  const auto c = CompareGridNav(g, s, q, {1, 2, 3, 4, 5});
  EXPECT_EQ(c.shaped_episodes.size(), 5u);
  EXPECT_GT(c.unshaped_median, 0.0);
  EXPECT_NEAR(c.ratio, c.shaped_median / c.unshaped_median, 1e-15);
  EXPECT_LT(c.ratio, 1.0);
}

}  // namespace
}  // namespace hears
