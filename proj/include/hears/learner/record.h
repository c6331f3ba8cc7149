#ifndef HEARS_LEARNER_RECORD_H_
#define HEARS_LEARNER_RECORD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hears/shaping.h"

namespace hears {

// H-EARS coefficients as consumed by the learners. With enabled = false the
// learner trains on the environment reward directly (vanilla).
struct ShapingSetup {
  bool enabled = true;
  double alpha_task = 0.0;
  double alpha_energy = 0.0;
  double lambda = 0.0;
  std::optional<ScheduleSpec> schedule;

  static ShapingSetup Vanilla() {
    ShapingSetup s;
    s.enabled = false;
    return s;
  }
};

struct EpisodeStats {
  int episode = 0;
  double base_return = 0.0;    // undiscounted sum of environment rewards
  double shaped_return = 0.0;  // undiscounted sum of training rewards
  int length = 0;
  double action_tv = 0.0;      // sum |a_t - a_{t-1}|
  double mean_action_energy = 0.0;
  double energy_start = 0.0;   // normalized energy E / normalizer
  double energy_end = 0.0;
  double energy_mean = 0.0;
  bool terminal = false;       // ended in an absorbing state
};

struct RunRecord {
  uint64_t seed = 0;
  std::vector<EpisodeStats> episodes;
  double wall_seconds = 0.0;  // not part of any emitted file
  bool failed = false;
  std::string error;
  std::optional<int> episodes_to_optimal;  // tabular runs with an optimality check
  int64_t total_steps = 0;

  std::vector<double> BaseReturns() const {
    std::vector<double> v;
    for (const auto& e : episodes) v.push_back(e.base_return);
    return v;
  }
};

}  // namespace hears

#endif  // HEARS_LEARNER_RECORD_H_
