#ifndef HEARS_LEARNER_TABULAR_H_
#define HEARS_LEARNER_TABULAR_H_

#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "hears/envs/gridnav.h"
#include "hears/learner/record.h"
#include "hears/mdp.h"
#include "hears/rng.h"

namespace hears {

struct TabularStep {
  int next = 0;
  double reward = 0.0;
  bool terminal = false;
};

class TabularEnv {
 public:
  virtual ~TabularEnv() = default;
  virtual int n_states() const = 0;
  virtual int n_actions() const = 0;
  virtual double gamma() const = 0;
  virtual int max_steps() const = 0;
  virtual int Reset(Rng& rng) = 0;
  virtual TabularStep Step(int s, int a, Rng& rng) = 0;
};

class GridNavTabular : public TabularEnv {
 public:
  explicit GridNavTabular(const GridNav& grid) : grid_(grid) {}
  int n_states() const override { return grid_.n_states(); }
  int n_actions() const override { return grid_.n_actions(); }
  double gamma() const override { return grid_.gamma(); }
  int max_steps() const override { return grid_.max_steps(); }
  int Reset(Rng&) override { return grid_.start(); }
  TabularStep Step(int s, int a, Rng& rng) override {
    const auto o = grid_.Step(s, a, rng);
    return {o.next, o.reward, o.terminal};
  }

 private:
  const GridNav& grid_;
};

// Samples a TabularMdp. Episodes start from `start` (or uniformly over
// non-terminal states when start < 0) and last max_steps steps.
class MdpSampler : public TabularEnv {
 public:
  MdpSampler(const TabularMdp& mdp, int start, int max_steps)
      : mdp_(mdp), start_(start), max_steps_(max_steps) {}
  int n_states() const override { return mdp_.n_states(); }
  int n_actions() const override { return mdp_.n_actions(); }
  double gamma() const override { return mdp_.gamma(); }
  int max_steps() const override { return max_steps_; }
  int Reset(Rng& rng) override;
  TabularStep Step(int s, int a, Rng& rng) override;

 private:
  const TabularMdp& mdp_;
  int start_;
  int max_steps_;
};

// Shaping for tabular learners: the combined potential per state and the
// action energy per action.
struct TabularShaping {
  bool enabled = false;
  Eigen::VectorXd potential;      // Phi(s); terminal states count as 0
  double lambda = 0.0;
  Eigen::VectorXd action_energy;  // E[a]
  std::vector<char> terminal;     // optional terminal mask for Phi = 0
};

struct QLearningConfig {
  int episodes = 500;
  int64_t max_total_steps = 0;  // 0: no cap
  double alpha0 = 0.5;
  double alpha_power = 0.0;     // alpha = alpha0 / (1 + n(s, a))^power
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 100;
  double q_init = 0.0;
  bool stop_when_optimal = false;
};

struct QLearningResult {
  RunRecord record;
  Eigen::MatrixXd q;
  Policy greedy;
};

// Called after every episode with the current Q table; returning true marks
// the greedy policy as (near-)optimal.
using OptimalityCheck = std::function<bool(const Eigen::MatrixXd& q)>;

// Epsilon-greedy Q-learning on the shaped reward. RNG consumption per step:
// one uniform for the epsilon test, then one integer draw for exploration or
// for breaking ties among several greedy actions, then whatever the
// environment consumes. Throws SimulationError when |Q| exceeds 1e6.
QLearningResult TabularQLearning(TabularEnv& env, const TabularShaping& shaping,
                                 const QLearningConfig& config, uint64_t seed,
                                 const OptimalityCheck& check = {});

// Greedy action with lowest-index ties, for evaluation.
Policy GreedyFromQ(const Eigen::MatrixXd& q);

// Deterministic greedy rollout on GridNav from the start; returns the
// discounted return (0 if the goal is not reached within max_steps).
double GridNavGreedyReturn(const GridNav& grid, const Eigen::MatrixXd& q);

}  // namespace hears

#endif  // HEARS_LEARNER_TABULAR_H_
