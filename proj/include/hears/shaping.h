#ifndef HEARS_SHAPING_H_
#define HEARS_SHAPING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hears/mdp.h"
#include "hears/types.h"

namespace hears {

// ---------------------------------------------------------------------------
// coefficient schedules

enum class ScheduleKind { kConstant, kLinear, kExponential };

ScheduleKind ParseScheduleKind(const std::string& name);
std::string ToString(ScheduleKind kind);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kExponential;
  double start_ratio = 100.0;  // alpha_task / alpha_energy at episode 0
  double end_ratio = 1.0;      // ratio held from `horizon` onwards
  int horizon = 1;             // episodes
  double total = 1.0;          // alpha_task + alpha_energy
};

// Weights (alpha_task, alpha_energy) whose ratio decays monotonically from
// start_ratio to end_ratio over `horizon` episodes and then holds. The sum of
// the two weights is `total`. kConstant keeps start_ratio forever.
std::pair<double, double> ScheduleWeights(int episode, ScheduleKind kind,
                                          double start_ratio, double end_ratio,
                                          int horizon, double total = 1.0);

inline std::pair<double, double> ScheduleWeights(int episode,
                                                 const ScheduleSpec& spec) {
  return ScheduleWeights(episode, spec.kind, spec.start_ratio, spec.end_ratio,
                         spec.horizon, spec.total);
}

// ---------------------------------------------------------------------------
// potentials

using StatePotential = std::function<double(const EnvState&)>;

// Phi(s) = alpha_task * phi_task(s) + alpha_energy * phi_energy(s)
struct PotentialSpec {
  double alpha_task = 0.0;
  double alpha_energy = 0.0;
  StatePotential phi_task;
  StatePotential phi_energy;
  std::optional<ScheduleSpec> schedule;

  // Composed potential with the current weights. A missing component counts
  // as zero. Throws ModelError on a non-finite result.
  double operator()(const EnvState& s) const;

  // Applies the schedule (if any) for the given episode.
  void SetEpisode(int episode);
};

// ---------------------------------------------------------------------------
// the shaped reward and its bounds

struct ShapingConfig {
  double lambda = 0.0;
  Eigen::MatrixXd q_matrix;  // empty means identity of the action dimension
  double gamma = 0.99;
  double r_max = 1.0;
  double phi_max = 1.0;
  double mean_action_energy = 1.0;

  // lambda >= 0 and Q symmetric PSD (eigenvalues >= -1e-10)
  void Validate() const;
};

// a^T Q a. An empty Q means identity.
double ActionEnergy(std::span<const double> action, const Eigen::MatrixXd& q_matrix);

// r + gamma * phi_next - phi - lambda * energy
inline double ShapedReward(double r, double phi, double phi_next,
                           double action_energy, double gamma, double lambda) {
  return r + gamma * phi_next - phi - lambda * action_energy;
}

// R_max / (2 gamma Phi_max E[E(a)]); throws on non-positive inputs.
double LambdaMax(double r_max, double gamma, double phi_max,
                 double mean_action_energy);

inline double LambdaMax(const ShapingConfig& c) {
  return LambdaMax(c.r_max, c.gamma, c.phi_max, c.mean_action_energy);
}

// R_max + 2 gamma Phi_max + lambda * max E(a)
double AdditiveRewardBound(const ShapingConfig& c, double max_action_energy);

inline double ClipPotential(double phi, double phi_max) {
  return phi > phi_max ? phi_max : (phi < -phi_max ? -phi_max : phi);
}

struct BoundReport {
  double limit = 0.0;             // the magnitude that must not be exceeded
  std::vector<size_t> flagged;    // indices with |r| > limit
  double max_abs = 0.0;
  size_t checked = 0;
  bool ok() const { return flagged.empty(); }
};

// Flags every observed shaped reward with |r| > 3 R_max.
BoundReport ShapedRewardBoundCheck(const ShapingConfig& config,
                                   std::span<const double> observed_rewards);

// Flags every observed reward with |r| > limit.
BoundReport RewardLimitCheck(double limit, std::span<const double> observed_rewards);

// Running mean of E(a) used for the lambda ceiling.
class ActionEnergyEstimate {
 public:
  void Add(double energy) {
    ++count_;
    mean_ += (energy - mean_) / static_cast<double>(count_);
  }
  double mean() const { return mean_; }
  int64_t count() const { return count_; }

 private:
  double mean_ = 0.0;
  int64_t count_ = 0;
};

// ---------------------------------------------------------------------------
// telescoping

// sum_t gamma^t (gamma Phi(s_{t+1}) - Phi(s_t)) by direct summation over a
// potential sequence Phi(s_0..s_T).
double DiscountedShapingSum(std::span<const double> potentials, double gamma);

// The same quantity from its boundary terms: gamma^T Phi(s_T) - Phi(s_0).
double TelescopedShapingSum(std::span<const double> potentials, double gamma);

// ---------------------------------------------------------------------------
// tabular embeddings and theorem checks

// R'(s,a,s') = R + gamma Phi(s') - Phi(s) - lambda E[a]. Terminal states keep
// their zero-reward self-loop and count as Phi = 0.
TabularMdp EmbedShapedMdp(const TabularMdp& mdp, const Eigen::VectorXd& potential,
                          double lambda, const Eigen::VectorXd& energy_per_action);

// Potential with terminal entries zeroed and all entries clipped to phi_max.
Eigen::VectorXd SanitizePotential(const TabularMdp& mdp, Eigen::VectorXd potential,
                                  double phi_max);

struct EnvelopeCheck {
  double finite_diff = 0.0;  // [J(pi*_{l+d}) - J(pi*_l)] / d
  double expected = 0.0;     // -E_{pi*_l}[sum gamma^t E(a_t)]
  bool policy_constant = false;  // greedy policy equal at l and l + d
};

// Finite-difference derivative of the optimal start value with respect to
// lambda versus the envelope prediction. start_dist empty means uniform over
// non-terminal states.
EnvelopeCheck EnvelopeDerivativeCheck(const TabularMdp& mdp,
                                      const Eigen::VectorXd& potential,
                                      const Eigen::VectorXd& energy_per_action,
                                      double lambda, double delta = 1e-4,
                                      const Eigen::VectorXd& start_dist = {});

// 2 gamma alpha_energy eps / ((1 - gamma)(1 - eps))
double ApproxPotentialBound(double epsilon, double gamma, double alpha_energy);

struct ApproxGapReport {
  double worst_relative_gap = 0.0;
  double worst_absolute_gap = 0.0;
  double bound_value = 0.0;
  double epsilon = 0.0;        // delta / ||Phi*||_inf
  bool absolute_only = false;  // |J_complete| < 1e-12, relative gap undefined
  int trials = 0;
  std::string note;
};

// Perturbs the energy potential by i.i.d. noise clipped to [-delta, delta],
// solves both lambda = 0 shaped MDPs (shaping alpha_energy * Phi) exactly and
// compares the greedy policies under the base reward from a fixed start
// distribution (uniform over non-terminal states when empty).
ApproxGapReport ApproxPotentialGapCheck(const TabularMdp& mdp,
                                        const Eigen::VectorXd& true_potential,
                                        double alpha_energy, double delta_bound,
                                        int trials, uint64_t seed,
                                        const Eigen::VectorXd& start_dist = {});

// Heuristic diagnostic: mean |dPhi_energy| over mean |r| on steps with a
// nonzero task reward. Returns 0 when no step has a nonzero reward.
double AccelerationRatio(std::span<const double> energy_potential_deltas,
                         std::span<const double> task_rewards);

}  // namespace hears

#endif  // HEARS_SHAPING_H_
