#include "hears/harness/config.h"

#include <cstdio>
#include <fstream>
#include <set>

namespace hears {

using nlohmann::json;

const std::vector<Preset>& Presets() {
  // benchmark rows; where two published rows disagree both ship under
  // their own names
  static const std::vector<Preset> kPresets = {
      {"vanilla", 0.0, 0.0, 0.0},
      {"ant-table", 0.005, 0.03, 0.01},
      {"ant-appendix", 0.01, 0.03, 0.0},
      {"hopper-table", 0.5, 0.001, 0.0005},
      {"hopper-appendix", 0.5, 0.01, 0.0001},
      {"lander", 0.5, 0.001, 0.0001},
      {"humanoid", 0.1, 0.001, 0.0001},
      {"vehicle", 0.45, 0.35, 0.20},
      {"vehicle-lowreg", 0.45, 0.35, 0.01},
  };
  return kPresets;
}

Preset FindPreset(const std::string& name) {
  for (const auto& p : Presets()) {
    if (p.name == name) return p;
  }
  if (name == "ant") return FindPreset("ant-table");
  if (name == "hopper") return FindPreset("hopper-table");
  throw ModelError("unknown preset '" + name + "'");
}

void ExperimentConfig::ApplyPreset(const std::string& name) {
  const Preset p = FindPreset(name);
  preset = p.name;
  shaping.enabled = p.name != "vanilla";
  shaping.alpha_task = p.alpha_task;
  shaping.alpha_energy = p.alpha_energy;
  shaping.lambda = p.lambda;
}

void ExperimentConfig::Validate() const {
  if (learner != "ac" && learner != "tabular") throw ModelError("config: learner must be ac or tabular");
  if (learner == "tabular" && env != "gridnav") throw ModelError("config: tabular learner needs env gridnav");
  if (learner == "ac" && env == "gridnav") throw ModelError("config: gridnav needs the tabular learner");
  if (episodes < 0) throw ModelError("config: episodes must be >= 0");
  if (seeds.empty()) throw ModelError("config: at least one seed");
  if (!(threshold_fraction > 0.0)) throw ModelError("config: threshold_fraction must be positive");
  if (!(stable_fraction > 0.0 && stable_fraction <= 1.0)) throw ModelError("config: stable_fraction in (0, 1]");
  if (threshold_window < 1) throw ModelError("config: threshold_window must be >= 1");
  if (threads < 1) throw ModelError("config: threads must be >= 1");
  if (shaping.lambda < 0.0) throw ModelError("config: lambda must be >= 0");
  if (ac.batch_size < 1 || ac.buffer_capacity < 1) throw ModelError("config: bad replay sizes");
  if (!(ac.tau > 0.0 && ac.tau <= 1.0)) throw ModelError("config: tau in (0, 1]");
}

namespace {

void CheckKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ModelError("config: '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ModelError("config: unknown key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void Get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json ScheduleJson(const ScheduleSpec& s) {
  return {{"kind", ToString(s.kind)},
          {"start_ratio", s.start_ratio},
          {"end_ratio", s.end_ratio},
          {"horizon", s.horizon},
          {"total", s.total}};
}

}  // namespace

json ToJson(const ExperimentConfig& c) {
  json j;
  j["env"] = c.env;
  j["learner"] = c.learner;
  j["preset"] = c.preset;
  j["shaping"] = {{"enabled", c.shaping.enabled},
                  {"alpha_task", c.shaping.alpha_task},
                  {"alpha_energy", c.shaping.alpha_energy},
                  {"lambda", c.shaping.lambda},
                  {"schedule", c.shaping.schedule ? ScheduleJson(*c.shaping.schedule) : json(nullptr)}};
  j["seeds"] = c.seeds;
  j["episodes"] = c.episodes;
  j["threshold_fraction"] = c.threshold_fraction;
  j["stable_fraction"] = c.stable_fraction;
  j["threshold_window"] = c.threshold_window;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["energy_trace"] = c.energy_trace;
  j["eval_steps"] = c.eval_steps;
  const AcConfig& a = c.ac;
  // reference optimizer of the benchmark runs: Adam (0.9, 0.999); plain
  // clipped gradient descent is used here
  j["ac"] = {{"hidden", a.hidden},
             {"gamma", a.gamma},
             {"tau", a.tau},
             {"lr_actor", a.lr_actor},
             {"lr_critic", a.lr_critic},
             {"batch_size", a.batch_size},
             {"buffer_capacity", a.buffer_capacity},
             {"warmup_steps", a.warmup_steps},
             {"update_every", a.update_every},
             {"sigma_start", a.sigma_start},
             {"sigma_end", a.sigma_end},
             {"sigma_decay_episodes", a.sigma_decay_episodes},
             {"grad_clip", a.grad_clip},
             {"max_steps", a.max_steps},
             {"normalize_advantage", a.normalize_advantage}};
  const QLearningConfig& q = c.q;
  j["q"] = {{"max_total_steps", q.max_total_steps},
            {"alpha0", q.alpha0},
            {"alpha_power", q.alpha_power},
            {"epsilon_start", q.epsilon_start},
            {"epsilon_end", q.epsilon_end},
            {"epsilon_decay_episodes", q.epsilon_decay_episodes},
            {"q_init", q.q_init},
            {"stop_when_optimal", q.stop_when_optimal}};
  json walls = json::array();
  for (const auto& [r, col] : c.grid.walls) walls.push_back({r, col});
  j["grid"] = {{"size", c.grid.size},
               {"gamma", c.grid.gamma},
               {"slip", c.grid.slip},
               {"max_steps", c.grid.max_steps},
               {"walls", walls}};
  return j;
}

ExperimentConfig ConfigFromJson(const json& j) {
  ExperimentConfig c;
  CheckKeys(j,
            {"env", "learner", "preset", "shaping", "seeds", "episodes", "threshold_fraction",
             "stable_fraction", "threshold_window", "out_dir", "threads", "energy_trace",
             "eval_steps", "ac", "q", "grid"},
            "config");
  Get(j, "env", c.env);
  Get(j, "learner", c.learner);
  if (j.contains("preset")) {
    const std::string p = j.at("preset").get<std::string>();
    if (p != "custom") c.ApplyPreset(p);
  }
  if (j.contains("shaping")) {
    const json& s = j.at("shaping");
    CheckKeys(s, {"enabled", "alpha_task", "alpha_energy", "lambda", "schedule"}, "shaping");
    Get(s, "enabled", c.shaping.enabled);
    Get(s, "alpha_task", c.shaping.alpha_task);
    Get(s, "alpha_energy", c.shaping.alpha_energy);
    Get(s, "lambda", c.shaping.lambda);
    if (s.contains("schedule") && !s.at("schedule").is_null()) {
      const json& sc = s.at("schedule");
      CheckKeys(sc, {"kind", "start_ratio", "end_ratio", "horizon", "total"}, "shaping.schedule");
      ScheduleSpec spec;
      if (sc.contains("kind")) spec.kind = ParseScheduleKind(sc.at("kind").get<std::string>());
      Get(sc, "start_ratio", spec.start_ratio);
      Get(sc, "end_ratio", spec.end_ratio);
      Get(sc, "horizon", spec.horizon);
      Get(sc, "total", spec.total);
      c.shaping.schedule = spec;
    }
  }
  Get(j, "seeds", c.seeds);
  Get(j, "episodes", c.episodes);
  Get(j, "threshold_fraction", c.threshold_fraction);
  Get(j, "stable_fraction", c.stable_fraction);
  Get(j, "threshold_window", c.threshold_window);
  Get(j, "out_dir", c.out_dir);
  Get(j, "threads", c.threads);
  Get(j, "energy_trace", c.energy_trace);
  Get(j, "eval_steps", c.eval_steps);
  if (j.contains("ac")) {
    const json& a = j.at("ac");
    CheckKeys(a,
              {"hidden", "gamma", "tau", "lr_actor", "lr_critic", "batch_size", "buffer_capacity",
               "warmup_steps", "update_every", "sigma_start", "sigma_end", "sigma_decay_episodes",
               "grad_clip", "max_steps", "normalize_advantage"},
              "ac");
    Get(a, "hidden", c.ac.hidden);
    Get(a, "gamma", c.ac.gamma);
    Get(a, "tau", c.ac.tau);
    Get(a, "lr_actor", c.ac.lr_actor);
    Get(a, "lr_critic", c.ac.lr_critic);
    Get(a, "batch_size", c.ac.batch_size);
    Get(a, "buffer_capacity", c.ac.buffer_capacity);
    Get(a, "warmup_steps", c.ac.warmup_steps);
    Get(a, "update_every", c.ac.update_every);
    Get(a, "sigma_start", c.ac.sigma_start);
    Get(a, "sigma_end", c.ac.sigma_end);
    Get(a, "sigma_decay_episodes", c.ac.sigma_decay_episodes);
    Get(a, "grad_clip", c.ac.grad_clip);
    Get(a, "max_steps", c.ac.max_steps);
    Get(a, "normalize_advantage", c.ac.normalize_advantage);
  }
  if (j.contains("q")) {
    const json& q = j.at("q");
    CheckKeys(q,
              {"max_total_steps", "alpha0", "alpha_power", "epsilon_start", "epsilon_end",
               "epsilon_decay_episodes", "q_init", "stop_when_optimal"},
              "q");
    Get(q, "max_total_steps", c.q.max_total_steps);
    Get(q, "alpha0", c.q.alpha0);
    Get(q, "alpha_power", c.q.alpha_power);
    Get(q, "epsilon_start", c.q.epsilon_start);
    Get(q, "epsilon_end", c.q.epsilon_end);
    Get(q, "epsilon_decay_episodes", c.q.epsilon_decay_episodes);
    Get(q, "q_init", c.q.q_init);
    Get(q, "stop_when_optimal", c.q.stop_when_optimal);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    CheckKeys(g, {"size", "gamma", "slip", "max_steps", "walls"}, "grid");
    Get(g, "size", c.grid.size);
    Get(g, "gamma", c.grid.gamma);
    Get(g, "slip", c.grid.slip);
    Get(g, "max_steps", c.grid.max_steps);
    if (g.contains("walls")) {
      c.grid.walls.clear();
      for (const auto& w : g.at("walls")) c.grid.walls.emplace_back(w.at(0).get<int>(), w.at(1).get<int>());
    }
  }
  c.ac.episodes = c.episodes;
  c.q.episodes = c.episodes;
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open config file " + path);
  return ConfigFromJson(json::parse(in));
}

uint64_t Fnv1a64(const std::string& data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ConfigHash(const ExperimentConfig& c) {
  json j = ToJson(c);
  // where results go and how many workers run them does not change them
  j.erase("out_dir");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(Fnv1a64(j.dump())));
  return buf;
}

std::vector<AblationVariant> AblationGrid(const ExperimentConfig& base) {
  const double t = base.shaping.alpha_task, e = base.shaping.alpha_energy, l = base.shaping.lambda;
  struct Row {
    const char* name;
    bool task, energy, reg;
  };
  static const Row kRows[] = {
      {"Vanilla", false, false, false},
      {"Energy Only", false, true, false},
      {"Task Only", true, false, false},
      {"Regularization Only", false, false, true},
      {"Without Regularization", true, true, false},
      {"Without Energy", true, false, true},
      {"Without Task", false, true, true},
      {"Full", true, true, true},
  };
  std::vector<AblationVariant> out;
  for (const Row& r : kRows) {
    AblationVariant v{r.name, base};
    v.config.shaping.alpha_task = r.task ? t : 0.0;
    v.config.shaping.alpha_energy = r.energy ? e : 0.0;
    v.config.shaping.lambda = r.reg ? l : 0.0;
    v.config.shaping.enabled = r.task || r.energy || r.reg;
    if (!v.config.shaping.enabled) v.config.shaping.schedule.reset();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace hears
