#include "hears/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "hears/envs/registry.h"
#include "hears/envs/vehicle.h"
#include "hears/harness/metrics.h"

namespace hears {

using nlohmann::json;

TabularShaping GridNavShaping(const GridNav& grid, const ShapingSetup& shaping) {
  TabularShaping t;
  t.enabled = shaping.enabled;
  t.lambda = shaping.lambda;
  t.potential = Eigen::VectorXd::Zero(grid.n_states());
  for (int s = 0; s < grid.n_states(); ++s) {
    if (grid.Distance(s) >= 0) t.potential[s] = shaping.alpha_task * grid.TaskPotential(s);
  }
  t.action_energy = Eigen::VectorXd::Ones(grid.n_actions());
  t.terminal = grid.mdp().terminal_mask();
  return t;
}

namespace {

OptimalityCheck GridNavOptimality(const GridNav& grid, double fraction) {
  const double optimal = ValueIteration(grid.mdp()).v[grid.start()];
  return [&grid, optimal, fraction](const Eigen::MatrixXd& q) {
    return GridNavGreedyReturn(grid, q) >= fraction * optimal;
  };
}

SeedRun RunGridNavSeed(const ExperimentConfig& config, uint64_t seed) {
  GridNav grid(config.grid);
  GridNavTabular env(grid);
  QLearningConfig q = config.q;
  q.episodes = config.episodes;
  auto res = TabularQLearning(env, GridNavShaping(grid, config.shaping), q, seed,
                              GridNavOptimality(grid, 0.95));
  SeedRun run;
  run.record = std::move(res.record);
  return run;
}

SeedRun RunAcSeed(const ExperimentConfig& config, uint64_t seed) {
  auto env = MakeEnv(config.env);
  AcConfig ac = config.ac;
  ac.episodes = config.episodes;
  AcResult trained = ActorCriticTrain(*env, config.shaping, ac, seed);
  SeedRun run;
  run.record = std::move(trained.record);
  if (!config.energy_trace || config.episodes == 0) return run;
  // deterministic evaluation from a seed-derived start
  Rng eval_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const EnvState start = env->Reset(eval_rng);
  const int steps = config.eval_steps > 0 ? config.eval_steps : env->max_steps();
  auto* vehicle = dynamic_cast<BicycleVehicle*>(env.get());
  StepHook hook;
  if (vehicle) {
    hook = [&run, vehicle, seed](int t, const StepResult&) {
      const VehicleStepInfo& info = vehicle->last_info();
      run.mpc_log.push_back({seed, t, info.feasibility, info.steer, info.yaw_moment,
                             info.mpc_converged, info.mpc_cost, info.inputs_within_bounds});
    };
  }
  run.evaluation = RunRollout(*env, ActorMeanPolicy(trained.agent), start, steps, hook);
  run.evaluation_probe = SummarizeRollout(run.evaluation);
  return run;
}

json OptionalInt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

SeedRun RunSeed(const ExperimentConfig& config, uint64_t seed) {
  return config.learner == "tabular" ? RunGridNavSeed(config, seed) : RunAcSeed(config, seed);
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentResult result;
  result.config = config;
  result.config_hash = ConfigHash(config);
  const size_t n = config.seeds.size();
  result.runs.resize(n);
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      const uint64_t seed = config.seeds[i];
      if (abort.load()) {
        result.runs[i].skipped = true;
        result.runs[i].record.seed = seed;
        continue;
      }
      try {
        result.runs[i] = RunSeed(config, seed);
      } catch (const std::exception& e) {
        result.runs[i].record.seed = seed;
        result.runs[i].record.failed = true;
        result.runs[i].record.error = e.what();
        abort.store(true);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<RunRecord> records;
  for (const auto& r : result.runs) {
    records.push_back(r.record);
    if (r.record.failed || r.skipped) result.failed = true;
  }
  result.summary = Summarize(config, result.config_hash, records);
  result.summary["failed"] = result.failed;
  json runs = json::array();
  for (const auto& r : result.runs) {
    json jr;
    jr["seed"] = r.record.seed;
    jr["status"] = r.skipped ? "skipped" : (r.record.failed ? "failed" : "ok");
    if (r.record.failed) jr["error"] = r.record.error;
    if (!r.evaluation.actions.empty()) {
      jr["evaluation"] = {{"base_return", r.evaluation_probe.base_return},
                          {"steps", r.evaluation_probe.steps},
                          {"action_tv", r.evaluation_probe.action_total_variation},
                          {"energy_change_total", r.evaluation_probe.energy_change_total},
                          {"net_energy_change", r.evaluation_probe.net_energy_change}};
    }
    runs.push_back(jr);
  }
  result.summary["runs"] = runs;
  return result;
}

double ThresholdFromStable(double stable_mean, double fraction) {
  return stable_mean - (1.0 - fraction) * std::abs(stable_mean);
}

json Summarize(const ExperimentConfig& config, const std::string& hash,
               const std::vector<RunRecord>& records, std::optional<double> threshold) {
  json s;
  s["config_hash"] = hash;
  s["code_version"] = kCodeVersion;
  s["seeds"] = config.seeds;
  s["env"] = config.env;
  s["learner"] = config.learner;
  s["preset"] = config.preset;
  s["shaping"] = {{"enabled", config.shaping.enabled},
                  {"alpha_task", config.shaping.alpha_task},
                  {"alpha_energy", config.shaping.alpha_energy},
                  {"lambda", config.shaping.lambda}};
  s["episodes"] = config.episodes;
  s["stable_fraction"] = config.stable_fraction;
  s["threshold_fraction"] = config.threshold_fraction;
  s["threshold_window"] = config.threshold_window;

  std::vector<double> finals;
  json per_seed = json::array();
  for (const RunRecord& r : records) {
    json js;
    js["seed"] = r.seed;
    js["episodes"] = r.episodes.size();
    if (!r.episodes.empty()) {
      const auto returns = r.BaseReturns();
      const auto tail = StableTail(returns, config.stable_fraction);
      const MeanStd ms = ComputeMeanStd(tail);
      js["final_mean"] = ms.mean;
      js["final_std"] = ms.std;
      if (std::abs(ms.mean) > 1e-12) {
        js["cv_percent"] = CoefficientOfVariation(tail);
      } else {
        js["cv_percent"] = nullptr;
        js["cv_flag"] = "mean ~ 0, CV undefined";
      }
      finals.push_back(ms.mean);
    }
    if (r.episodes_to_optimal) js["episodes_to_optimal"] = *r.episodes_to_optimal;
    per_seed.push_back(js);
  }

  json agg;
  if (finals.empty()) {
    agg["final_mean"] = nullptr;
    agg["final_std"] = nullptr;
    agg["threshold"] = nullptr;
    agg["median_episodes_to_threshold"] = nullptr;
  } else {
    const MeanStd ms = ComputeMeanStd(finals);
    agg["final_mean"] = ms.mean;
    agg["final_std"] = ms.std;
    const double thr = threshold ? *threshold : ThresholdFromStable(ms.mean, config.threshold_fraction);
    agg["threshold"] = thr;
    std::vector<double> reached;
    for (size_t k = 0; k < records.size(); ++k) {
      if (records[k].episodes.empty()) continue;
      const auto returns = records[k].BaseReturns();
      const auto e = EpisodesToThreshold(returns, thr, config.threshold_window);
      per_seed[k]["episodes_to_threshold"] = OptionalInt(e);
      if (e) reached.push_back(*e);
    }
    agg["seeds_reaching_threshold"] = reached.size();
    agg["median_episodes_to_threshold"] = reached.empty() ? json(nullptr) : json(Median(reached));
    std::vector<double> cvs;
    for (const auto& js : per_seed) {
      if (js.contains("cv_percent") && !js["cv_percent"].is_null()) cvs.push_back(js["cv_percent"].get<double>());
    }
    agg["mean_cv_percent"] = cvs.empty() ? json(nullptr) : json(ComputeMeanStd(cvs).mean);
  }
  std::vector<double> to_opt;
  for (const RunRecord& r : records) {
    if (r.episodes_to_optimal) to_opt.push_back(*r.episodes_to_optimal);
  }
  if (!to_opt.empty()) agg["median_episodes_to_optimal"] = Median(to_opt);
  s["aggregate"] = agg;
  s["per_seed"] = per_seed;
  return s;
}

void WriteExperiment(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const FileStamp stamp{result.config_hash, result.config.seeds, kCodeVersion};
  json summary = result.summary;
  summary["config"] = ToJson(result.config);
  summary["config"].erase("out_dir");
  summary["config"].erase("threads");
  WriteTextFile(dir + "/summary.json", summary.dump(2) + "\n");
  std::vector<RunRecord> records;
  std::vector<SeedRollout> rollouts;
  std::vector<MpcLogRow> mpc;
  for (const SeedRun& r : result.runs) {
    records.push_back(r.record);
    if (!r.evaluation.energy.empty()) rollouts.push_back({r.record.seed, r.evaluation});
    mpc.insert(mpc.end(), r.mpc_log.begin(), r.mpc_log.end());
  }
  WriteEpisodesCsv(dir + "/episodes.csv", stamp, records);
  WriteEnergyTraceCsv(dir + "/energy_trace.csv", stamp, rollouts);
  WriteMpcLogCsv(dir + "/mpc_log.csv", stamp, mpc);
}

GridNavComparison CompareGridNav(const GridNavOptions& options, const ShapingSetup& shaping,
                                 const QLearningConfig& q, const std::vector<uint64_t>& seeds) {
  GridNav grid(options);
  const OptimalityCheck check = GridNavOptimality(grid, 0.95);
  const TabularShaping on = GridNavShaping(grid, shaping);
  const TabularShaping off = GridNavShaping(grid, ShapingSetup::Vanilla());
  QLearningConfig cfg = q;
  cfg.stop_when_optimal = true;
  GridNavComparison out;
  std::vector<double> a, b;
  // never reaching counts as the full budget in the medians
  for (uint64_t seed : seeds) {
    GridNavTabular env(grid);
    const auto rs = TabularQLearning(env, on, cfg, seed, check);
    const auto ru = TabularQLearning(env, off, cfg, seed, check);
    const int es = rs.record.episodes_to_optimal.value_or(-1);
    const int eu = ru.record.episodes_to_optimal.value_or(-1);
    out.shaped_episodes.push_back(es);
    out.unshaped_episodes.push_back(eu);
    a.push_back(es < 0 ? cfg.episodes : es);
    b.push_back(eu < 0 ? cfg.episodes : eu);
  }
  out.shaped_median = Median(a);
  out.unshaped_median = Median(b);
  out.ratio = out.unshaped_median > 0 ? out.shaped_median / out.unshaped_median : 0.0;
  return out;
}

}  // namespace hears
