#ifndef HEARS_MDP_H_
#define HEARS_MDP_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hears/types.h"

namespace hears {

// Finite MDP with rewards indexed by (s, a, s'). Immutable after
// construction; the constructor validates every invariant:
//   - each P[s][a][.] row sums to 1 within 1e-9, entries in [0, 1]
//   - gamma in (0, 1)
//   - terminal states self-loop with zero reward under every action
class TabularMdp {
 public:
  TabularMdp(int n_states, int n_actions, std::vector<double> transition,
             std::vector<double> reward, double gamma,
             std::vector<char> terminal);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  bool terminal(int s) const { return terminal_[s] != 0; }
  const std::vector<char>& terminal_mask() const { return terminal_; }

  double P(int s, int a, int next) const { return transition_[Index(s, a, next)]; }
  double R(int s, int a, int next) const { return reward_[Index(s, a, next)]; }

  // sum_s' P(s,a,s') R(s,a,s')
  double ExpectedReward(int s, int a) const { return expected_reward_[s * n_actions_ + a]; }

  const std::vector<double>& transition() const { return transition_; }
  const std::vector<double>& reward() const { return reward_; }

  // copy with a different reward tensor (P, gamma, terminal unchanged)
  TabularMdp WithReward(std::vector<double> reward) const;

  size_t Index(int s, int a, int next) const {
    return (static_cast<size_t>(s) * n_actions_ + a) * n_states_ + next;
  }

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
  std::vector<char> terminal_;
  std::vector<double> expected_reward_;
};

struct ValueTable {
  Eigen::VectorXd v;  // v[s] = max_a q(s, a)
  Eigen::MatrixXd q;  // n_states x n_actions
  double residual = 0.0;
  int iterations = 0;
};

using Policy = std::vector<int>;

// Synchronous value iteration. Stops when the sup-norm Bellman residual is at
// most tol; throws SolverError (carrying the residual) after max_iters.
ValueTable ValueIteration(const TabularMdp& mdp, double tol = 1e-10,
                          int max_iters = 1000000);

// Argmax per state; ties go to the lowest action index.
Policy GreedyPolicy(const ValueTable& values);

// Exact evaluation of a deterministic policy by solving
// (I - gamma P_pi) v = r_pi. Throws SolverError if the Bellman expectation
// residual of the solution exceeds tol.
Eigen::VectorXd EvaluatePolicy(const TabularMdp& mdp, const Policy& policy,
                               double tol = 1e-10);

// Same for a stochastic policy given as an n_states x n_actions matrix whose
// rows are action distributions.
Eigen::VectorXd EvaluatePolicy(const TabularMdp& mdp,
                               const Eigen::MatrixXd& action_probs,
                               double tol = 1e-10);

// Evaluates a deterministic policy under an arbitrary per-(s, a) reward,
// e.g. the action energy. Terminal states contribute zero.
Eigen::VectorXd EvaluatePolicyReward(const TabularMdp& mdp, const Policy& policy,
                                     const Eigen::MatrixXd& reward_sa,
                                     double tol = 1e-10);

// sup_s |v - T v|
double BellmanResidual(const TabularMdp& mdp, const Eigen::VectorXd& v);

// Random MDP: transition rows from a flat Dirichlet (normalized exponential
// draws), rewards uniform in [-reward_scale, reward_scale]. Bit-identical for
// identical arguments.
TabularMdp RandomMdp(uint64_t seed, int n_states, int n_actions,
                     double reward_scale, double gamma = 0.9);

}  // namespace hears

#endif  // HEARS_MDP_H_
