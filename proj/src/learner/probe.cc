#include "hears/learner/probe.h"

#include <cmath>

namespace hears {

PolicyFn ConstantPolicy(std::vector<double> action) {
  return [action = std::move(action)](const EnvState&, const std::vector<double>&, int) {
    return action;
  };
}

PolicyFn AlternatingPolicy(int action_dim, double amplitude) {
  return [action_dim, amplitude](const EnvState&, const std::vector<double>&, int t) {
    return std::vector<double>(action_dim, t % 2 == 0 ? amplitude : -amplitude);
  };
}

PolicyFn ActorMeanPolicy(const ActorCritic& agent) {
  return [&agent](const EnvState&, const std::vector<double>& obs, int) {
    const Eigen::VectorXd mu =
        agent.Mean(Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size())));
    return std::vector<double>(mu.data(), mu.data() + mu.size());
  };
}

Rollout RunRollout(Env& env, const PolicyFn& policy, const EnvState& start, int steps,
                   const StepHook& on_step) {
  Rollout r;
  const double norm = env.energy().normalizer();
  EnvState s = start;
  r.states.push_back(s);
  r.energy.push_back(TotalEnergy(env.energy(), s) / norm);
  for (int t = 0; t < steps; ++t) {
    std::vector<double> a = policy(s, env.Observe(s), t);
    ClipAction(a);
    const StepResult res = env.Step(s, a);
    if (on_step) on_step(t, res);
    r.actions.push_back(a);
    r.rewards.push_back(res.reward);
    r.contact.push_back(res.contact ? 1 : 0);
    r.base_return += res.reward;
    s = res.next;
    r.states.push_back(s);
    r.energy.push_back(TotalEnergy(env.energy(), s) / norm);
    if (res.terminal) {
      r.terminal = true;
      break;
    }
  }
  return r;
}

ProbeResult SummarizeRollout(const Rollout& r) {
  ProbeResult p;
  p.steps = static_cast<int>(r.actions.size());
  p.base_return = r.base_return;
  for (size_t t = 1; t < r.actions.size(); ++t) {
    double d = 0.0;
    for (size_t k = 0; k < r.actions[t].size(); ++k) {
      const double x = r.actions[t][k] - r.actions[t - 1][k];
      d += x * x;
    }
    p.action_total_variation += std::sqrt(d);
  }
  for (size_t t = 1; t < r.energy.size(); ++t) {
    p.energy_change_total += std::abs(r.energy[t] - r.energy[t - 1]);
  }
  if (!r.energy.empty()) p.net_energy_change = std::abs(r.energy.back() - r.energy.front());
  return p;
}

ProbeResult OscillationProbe(Env& env, const PolicyFn& policy, const EnvState& start, int steps) {
  return SummarizeRollout(RunRollout(env, policy, start, steps));
}

}  // namespace hears
