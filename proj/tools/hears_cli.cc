// command-line front end: run, ablate, verify, plotdata

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hears/harness/config.h"
#include "hears/harness/experiment.h"
#include "hears/harness/io.h"
#include "hears/harness/metrics.h"
#include "hears/harness/verify.h"

namespace {

using hears::ExperimentConfig;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string env;
  std::string learner;
  std::string preset;
  std::vector<uint64_t> seeds;
  int episodes = -1;
  int threads = -1;
  std::string out;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--env", f.env, "pendulum, lander, hopper, vehicle, vehicle-test or gridnav");
  app->add_option("--learner", f.learner, "ac or tabular");
  app->add_option("--preset", f.preset, "coefficient preset name");
  app->add_option("--seed", f.seeds, "seed (repeatable)");
  app->add_option("--episodes", f.episodes, "episodes per seed");
  app->add_option("--threads", f.threads, "worker threads");
  app->add_option("--out", f.out, "output directory");
}

// file values first, then flags
ExperimentConfig BuildConfig(const CommonFlags& f) {
  ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : hears::LoadConfig(f.config_path);
  if (!f.env.empty()) {
    c.env = f.env;
    if (c.env == "gridnav") c.learner = "tabular";
  }
  if (!f.learner.empty()) c.learner = f.learner;
  if (!f.preset.empty()) c.ApplyPreset(f.preset);
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (f.episodes >= 0) {
    c.episodes = f.episodes;
    c.ac.episodes = f.episodes;
    c.q.episodes = f.episodes;
  }
  if (f.threads > 0) c.threads = f.threads;
  if (!f.out.empty()) c.out_dir = f.out;
  c.Validate();
  return c;
}

void PrintSummary(const std::string& label, const json& summary) {
  const json& agg = summary["aggregate"];
  std::cout << label << ": final " << agg["final_mean"].dump() << " +/- " << agg["final_std"].dump()
            << ", threshold " << agg["threshold"].dump() << ", median episodes to threshold "
            << agg["median_episodes_to_threshold"].dump();
  if (agg.contains("mean_cv_percent")) std::cout << ", CV " << agg["mean_cv_percent"].dump() << "%";
  std::cout << "\n";
}

int CmdRun(const CommonFlags& f) {
  const ExperimentConfig c = BuildConfig(f);
  const auto result = hears::RunExperiment(c);
  hears::WriteExperiment(result, c.out_dir);
  PrintSummary(c.env + " [" + c.preset + "] " + result.config_hash, result.summary);
  std::cout << "wrote " << c.out_dir << "\n";
  return result.failed ? 1 : 0;
}

std::string Slug(const std::string& name) {
  std::string s;
  for (char ch : name) s += ch == ' ' ? '_' : static_cast<char>(std::tolower(ch));
  return s;
}

int CmdAblate(const CommonFlags& f, bool list_only) {
  const ExperimentConfig base = BuildConfig(f);
  const auto grid = hears::AblationGrid(base);
  json listing = json::array();
  for (const auto& v : grid) {
    listing.push_back({{"name", v.name},
                       {"dir", Slug(v.name)},
                       {"enabled", v.config.shaping.enabled},
                       {"alpha_task", v.config.shaping.alpha_task},
                       {"alpha_energy", v.config.shaping.alpha_energy},
                       {"lambda", v.config.shaping.lambda},
                       {"config_hash", hears::ConfigHash(v.config)}});
    std::cout << v.name << ": (" << v.config.shaping.alpha_task << ", "
              << v.config.shaping.alpha_energy << ", " << v.config.shaping.lambda << ")\n";
  }
  std::filesystem::create_directories(base.out_dir);
  hears::WriteTextFile(base.out_dir + "/ablation.json", listing.dump(2) + "\n");
  if (list_only) return 0;

  // threshold from the Full variant's stable mean, as for the ablation tables
  std::vector<hears::ExperimentResult> results;
  bool failed = false;
  for (const auto& v : grid) {
    ExperimentConfig c = v.config;
    c.out_dir = base.out_dir + "/" + Slug(v.name);
    results.push_back(hears::RunExperiment(c));
    failed = failed || results.back().failed;
  }
  const json& full = results.back().summary["aggregate"]["final_mean"];
  std::optional<double> thr;
  if (full.is_number()) thr = hears::ThresholdFromStable(full.get<double>(), base.threshold_fraction);
  json table = json::array();
  for (size_t i = 0; i < grid.size(); ++i) {
    auto& r = results[i];
    std::vector<hears::RunRecord> records;
    for (const auto& run : r.runs) records.push_back(run.record);
    const auto runs = r.summary["runs"];
    const bool f_failed = r.summary["failed"];
    r.summary = hears::Summarize(r.config, r.config_hash, records, thr);
    r.summary["runs"] = runs;
    r.summary["failed"] = f_failed;
    hears::WriteExperiment(r, r.config.out_dir);
    PrintSummary(grid[i].name, r.summary);
    table.push_back({{"name", grid[i].name}, {"aggregate", r.summary["aggregate"]}});
  }
  hears::WriteTextFile(base.out_dir + "/ablation_summary.json", table.dump(2) + "\n");
  return failed ? 1 : 0;
}

int CmdVerify(const std::vector<int>& only, const std::string& out) {
  std::set<int> wanted(only.begin(), only.end());
  json report = json::array();
  bool all = true;
  for (const auto& spec : hears::AllChecks()) {
    if (!wanted.empty() && !wanted.count(spec.id)) continue;
    const hears::CheckResult r = hears::RunCheck(spec);
    std::cout << hears::FormatCheck(r) << std::endl;
    all = all && r.passed;
    report.push_back({{"id", r.id},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"detail", r.detail},
                      {"seconds", r.seconds},
                      {"limit_seconds", r.limit_seconds}});
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    hears::WriteTextFile(out + "/verify.json", report.dump(2) + "\n");
  }
  return all ? 0 : 1;
}

// learning curves across seeds from one or more experiment directories
int CmdPlotdata(const std::vector<std::string>& inputs, const std::string& out) {
  std::ostringstream csv;
  csv << "run,episode,mean_return,std_return,min_return,max_return,mean_action_tv,n_seeds\n";
  for (const std::string& dir : inputs) {
    const auto by_seed = hears::ReadEpisodesCsv(dir + "/episodes.csv");
    size_t n = 0;
    for (const auto& [seed, eps] : by_seed) n = std::max(n, eps.size());
    const std::string label = std::filesystem::path(dir).filename().string();
    for (size_t e = 0; e < n; ++e) {
      std::vector<double> ret;
      double tv = 0.0;
      for (const auto& [seed, eps] : by_seed) {
        if (e < eps.size()) {
          ret.push_back(eps[e].base_return);
          tv += eps[e].action_tv;
        }
      }
      const hears::MeanStd ms = hears::ComputeMeanStd(ret);
      csv << label << ',' << e << ',' << hears::FormatDouble(ms.mean) << ','
          << hears::FormatDouble(ms.std) << ','
          << hears::FormatDouble(*std::min_element(ret.begin(), ret.end())) << ','
          << hears::FormatDouble(*std::max_element(ret.begin(), ret.end())) << ','
          << hears::FormatDouble(tv / ret.size()) << ',' << ret.size() << '\n';
    }
  }
  const std::filesystem::path p(out);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  hears::WriteTextFile(out, csv.str());
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-aware reward shaping experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, ablate_flags;
  auto* run = app.add_subcommand("run", "train one configuration over its seeds");
  AddCommon(run, run_flags);

  bool list_only = false;
  auto* ablate = app.add_subcommand("ablate", "run the 8-variant component ablation");
  AddCommon(ablate, ablate_flags);
  ablate->add_flag("--list", list_only, "only write the variant list");

  std::vector<int> only;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "run the theorem and experiment checks");
  verify->add_option("--only", only, "check ids to run (repeatable)");
  verify->add_option("--out", verify_out, "directory for verify.json");

  std::vector<std::string> plot_in;
  std::string plot_out = "curves.csv";
  auto* plot = app.add_subcommand("plotdata", "aggregate episodes.csv files into curve data");
  plot->add_option("--in", plot_in, "experiment output directory (repeatable)")->required();
  plot->add_option("--out", plot_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return CmdRun(run_flags);
    if (ablate->parsed()) return CmdAblate(ablate_flags, list_only);
    if (verify->parsed()) return CmdVerify(only, verify_out);
    if (plot->parsed()) return CmdPlotdata(plot_in, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
