#ifndef HEARS_HARNESS_CONFIG_H_
#define HEARS_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hears/envs/gridnav.h"
#include "hears/learner/actor_critic.h"
#include "hears/learner/record.h"
#include "hears/learner/tabular.h"

namespace hears {

inline constexpr const char* kCodeVersion = "hears-0.1.0";

struct Preset {
  std::string name;
  double alpha_task = 0.0;
  double alpha_energy = 0.0;
  double lambda = 0.0;
};

// Named coefficient sets. Throws ModelError for an unknown name.
Preset FindPreset(const std::string& name);
const std::vector<Preset>& Presets();

struct ExperimentConfig {
  std::string env = "pendulum";    // pendulum, lander, hopper, vehicle, vehicle-test, gridnav
  std::string learner = "ac";      // ac or tabular
  std::string preset = "custom";
  ShapingSetup shaping;
  std::vector<uint64_t> seeds{12345, 22345, 32345, 42345, 52345};
  int episodes = 100;
  double threshold_fraction = 0.885;  // of the final stable mean
  double stable_fraction = 0.2;       // trailing share of episodes counted as stable
  int threshold_window = 10;
  std::string out_dir = "out";
  int threads = 1;
  bool energy_trace = true;           // record a deterministic evaluation rollout
  int eval_steps = 0;                 // 0: environment default
  AcConfig ac;
  QLearningConfig q;
  GridNavOptions grid;

  void Validate() const;
  void ApplyPreset(const std::string& name);
};

nlohmann::json ToJson(const ExperimentConfig& c);
// Missing keys keep their defaults; unknown keys throw ModelError.
ExperimentConfig ConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadConfig(const std::string& path);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits
std::string ConfigHash(const ExperimentConfig& c);
uint64_t Fnv1a64(const std::string& data);

struct AblationVariant {
  std::string name;
  ExperimentConfig config;
};

// The 2^3 lattice over (task, energy, regularization), in table order:
// Vanilla, Energy Only, Task Only, Reg Only, Without Reg, Without Energy,
// Without Task, Full. Vanilla disables shaping entirely.
std::vector<AblationVariant> AblationGrid(const ExperimentConfig& base);

}  // namespace hears

#endif  // HEARS_HARNESS_CONFIG_H_
