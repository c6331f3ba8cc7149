#ifndef HEARS_HARNESS_EXPERIMENT_H_
#define HEARS_HARNESS_EXPERIMENT_H_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hears/harness/config.h"
#include "hears/harness/io.h"

namespace hears {

struct SeedRun {
  RunRecord record;
  bool skipped = false;     // not started because an earlier run failed
  Rollout evaluation;       // deterministic rollout after training
  ProbeResult evaluation_probe;
  std::vector<MpcLogRow> mpc_log;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<SeedRun> runs;  // seed order
  nlohmann::json summary;
  bool failed = false;
};

// One run per seed, fanned out over config.threads workers and merged in
// seed order. A failing run stops further runs from starting; completed
// runs are kept and the result is marked failed.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// A single seed of the experiment, as executed by a worker.
SeedRun RunSeed(const ExperimentConfig& config, uint64_t seed);

// Threshold for episodes-to-threshold: fraction of the stable mean, applied
// to the magnitude so that negative returns get a stricter bar.
double ThresholdFromStable(double stable_mean, double fraction);

// Summary of one experiment. With `threshold` unset the threshold comes from
// the experiment's own stable mean.
nlohmann::json Summarize(const ExperimentConfig& config, const std::string& hash,
                         const std::vector<RunRecord>& records,
                         std::optional<double> threshold = std::nullopt);

// summary.json, episodes.csv, energy_trace.csv, mpc_log.csv
void WriteExperiment(const ExperimentResult& result, const std::string& dir);

// Paired GridNav comparison over the same seeds: shaped vs unshaped
// episodes to a greedy policy reaching 95% of the optimal return.
struct GridNavComparison {
  std::vector<int> shaped_episodes;    // -1 when never reached
  std::vector<int> unshaped_episodes;
  double shaped_median = 0.0;
  double unshaped_median = 0.0;
  double ratio = 0.0;  // shaped / unshaped medians
};

GridNavComparison CompareGridNav(const GridNavOptions& grid, const ShapingSetup& shaping,
                                 const QLearningConfig& q, const std::vector<uint64_t>& seeds);

// Tabular shaping tables for GridNav: alpha_task * (-distance) potential and
// per-action energy 1 (unit moves).
TabularShaping GridNavShaping(const GridNav& grid, const ShapingSetup& shaping);

}  // namespace hears

#endif  // HEARS_HARNESS_EXPERIMENT_H_
