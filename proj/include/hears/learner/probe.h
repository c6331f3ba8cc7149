#ifndef HEARS_LEARNER_PROBE_H_
#define HEARS_LEARNER_PROBE_H_

#include <functional>
#include <vector>

#include "hears/envs/env.h"
#include "hears/learner/actor_critic.h"

namespace hears {

// Deterministic policy: (state, observation, step index) -> action.
using PolicyFn =
    std::function<std::vector<double>(const EnvState&, const std::vector<double>&, int)>;

PolicyFn ConstantPolicy(std::vector<double> action);
// a_t = (-1)^t * amplitude on every component
PolicyFn AlternatingPolicy(int action_dim, double amplitude);
// tanh-mean of the actor, no exploration noise
PolicyFn ActorMeanPolicy(const ActorCritic& agent);

struct Rollout {
  std::vector<EnvState> states;               // steps + 1 entries
  std::vector<std::vector<double>> actions;   // clipped actions
  std::vector<double> rewards;
  std::vector<double> energy;                 // E / normalizer per state
  std::vector<char> contact;
  double base_return = 0.0;
  bool terminal = false;
};

using StepHook = std::function<void(int t, const StepResult& result)>;

// Runs up to `steps` steps from `start`, stopping at a terminal state.
Rollout RunRollout(Env& env, const PolicyFn& policy, const EnvState& start, int steps,
                   const StepHook& on_step = {});

struct ProbeResult {
  double action_total_variation = 0.0;  // sum_t |a_t - a_{t-1}|
  double energy_change_total = 0.0;     // sum_t |E_t - E_{t-1}|, normalized energy
  double net_energy_change = 0.0;       // |E_T - E_0|, normalized energy
  double base_return = 0.0;
  int steps = 0;
};

ProbeResult OscillationProbe(Env& env, const PolicyFn& policy, const EnvState& start, int steps);
ProbeResult SummarizeRollout(const Rollout& r);

}  // namespace hears

#endif  // HEARS_LEARNER_PROBE_H_
