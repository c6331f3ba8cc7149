#include "hears/shaping.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hears/rng.h"

namespace hears {

ScheduleKind ParseScheduleKind(const std::string& name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "exponential") return ScheduleKind::kExponential;
  throw ModelError("unknown schedule kind '" + name + "'");
}

std::string ToString(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kLinear: return "linear";
    case ScheduleKind::kExponential: return "exponential";
  }
  return "unknown";
}

std::pair<double, double> ScheduleWeights(int episode, ScheduleKind kind,
                                          double start_ratio, double end_ratio,
                                          int horizon, double total) {
  if (horizon <= 0) throw ModelError("ScheduleWeights: horizon must be positive");
  if (!(start_ratio > 0.0) || !(end_ratio > 0.0)) {
    throw ModelError("ScheduleWeights: ratios must be positive");
  }
  if (!(total >= 0.0)) throw ModelError("ScheduleWeights: total must be >= 0");
  double ratio = start_ratio;
  if (kind != ScheduleKind::kConstant) {
    if (episode >= horizon) {
      ratio = end_ratio;
    } else if (episode > 0) {
      const double frac = static_cast<double>(episode) / horizon;
      if (kind == ScheduleKind::kLinear) {
        ratio = start_ratio + (end_ratio - start_ratio) * frac;
      } else {
        ratio = start_ratio * std::pow(end_ratio / start_ratio, frac);
      }
    }
  }
  const double alpha_energy = total / (1.0 + ratio);
  const double alpha_task = total - alpha_energy;
  return {alpha_task, alpha_energy};
}

double PotentialSpec::operator()(const EnvState& s) const {
  double phi = 0.0;
  if (alpha_task != 0.0 && phi_task) phi += alpha_task * phi_task(s);
  if (alpha_energy != 0.0 && phi_energy) phi += alpha_energy * phi_energy(s);
  if (!std::isfinite(phi)) throw ModelError("potential is not finite");
  return phi;
}

void PotentialSpec::SetEpisode(int episode) {
  if (!schedule) return;
  auto [task, energy] = ScheduleWeights(episode, *schedule);
  alpha_task = task;
  alpha_energy = energy;
}

void ShapingConfig::Validate() const {
  if (!(lambda >= 0.0)) throw ModelError("ShapingConfig: lambda must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ModelError("ShapingConfig: gamma must lie in (0,1)");
  if (q_matrix.size() == 0) return;
  if (q_matrix.rows() != q_matrix.cols()) {
    throw ModelError("ShapingConfig: Q must be square");
  }
  if ((q_matrix - q_matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ModelError("ShapingConfig: Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q_matrix);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw ModelError("ShapingConfig: Q must be positive semidefinite");
  }
}

double ActionEnergy(std::span<const double> action, const Eigen::MatrixXd& q_matrix) {
  const auto n = static_cast<Eigen::Index>(action.size());
  if (q_matrix.size() == 0) {
    double e = 0.0;
    for (double v : action) e += v * v;
    return e;
  }
  if (q_matrix.rows() != n || q_matrix.cols() != n) {
    throw ModelError("ActionEnergy: action has dimension " + std::to_string(n) +
                     " but Q is " + std::to_string(q_matrix.rows()) + "x" +
                     std::to_string(q_matrix.cols()));
  }
  Eigen::Map<const Eigen::VectorXd> a(action.data(), n);
  // PSD Q can still give -1e-17 through rounding
  return std::max(0.0, a.dot(q_matrix * a));
}

double LambdaMax(double r_max, double gamma, double phi_max,
                 double mean_action_energy) {
  if (!(r_max > 0.0) || !(gamma > 0.0) || !(phi_max > 0.0) ||
      !(mean_action_energy > 0.0)) {
    throw ModelError("LambdaMax: all inputs must be positive");
  }
  return r_max / (2.0 * gamma * phi_max * mean_action_energy);
}

double AdditiveRewardBound(const ShapingConfig& c, double max_action_energy) {
  return c.r_max + 2.0 * c.gamma * c.phi_max + c.lambda * max_action_energy;
}

BoundReport RewardLimitCheck(double limit, std::span<const double> observed) {
  BoundReport report;
  report.limit = limit;
  report.checked = observed.size();
  for (size_t i = 0; i < observed.size(); ++i) {
    const double m = std::abs(observed[i]);
    report.max_abs = std::max(report.max_abs, m);
    if (!(m <= limit)) report.flagged.push_back(i);
  }
  return report;
}

BoundReport ShapedRewardBoundCheck(const ShapingConfig& config,
                                   std::span<const double> observed) {
  return RewardLimitCheck(3.0 * config.r_max, observed);
}

double DiscountedShapingSum(std::span<const double> potentials, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (size_t t = 0; t + 1 < potentials.size(); ++t) {
    total += discount * (gamma * potentials[t + 1] - potentials[t]);
    discount *= gamma;
  }
  return total;
}

double TelescopedShapingSum(std::span<const double> potentials, double gamma) {
  if (potentials.empty()) return 0.0;
  const double last = potentials.back();
  const auto steps = static_cast<double>(potentials.size() - 1);
  return std::pow(gamma, steps) * last - potentials.front();
}

TabularMdp EmbedShapedMdp(const TabularMdp& mdp, const Eigen::VectorXd& potential,
                          double lambda, const Eigen::VectorXd& energy_per_action) {
  const int ns = mdp.n_states();
  const int na = mdp.n_actions();
  if (potential.size() != ns) throw ModelError("EmbedShapedMdp: potential size mismatch");
  if (energy_per_action.size() != na) {
    throw ModelError("EmbedShapedMdp: energy_per_action size mismatch");
  }
  if (!potential.allFinite()) throw ModelError("EmbedShapedMdp: potential not finite");
  if (energy_per_action.minCoeff() < 0.0) {
    throw ModelError("EmbedShapedMdp: action energies must be >= 0");
  }
  const double gamma = mdp.gamma();
  auto phi = [&](int s) { return mdp.terminal(s) ? 0.0 : potential[s]; };
  std::vector<double> reward = mdp.reward();
  for (int s = 0; s < ns; ++s) {
    if (mdp.terminal(s)) continue;
    for (int a = 0; a < na; ++a) {
      for (int t = 0; t < ns; ++t) {
        double& r = reward[mdp.Index(s, a, t)];
        r = ShapedReward(r, phi(s), phi(t), energy_per_action[a], gamma, lambda);
      }
    }
  }
  return mdp.WithReward(std::move(reward));
}

Eigen::VectorXd SanitizePotential(const TabularMdp& mdp, Eigen::VectorXd potential,
                                  double phi_max) {
  for (int s = 0; s < mdp.n_states(); ++s) {
    potential[s] = mdp.terminal(s) ? 0.0 : ClipPotential(potential[s], phi_max);
  }
  return potential;
}

namespace {

Eigen::VectorXd StartDistribution(const TabularMdp& mdp, const Eigen::VectorXd& given) {
  if (given.size() != 0) {
    if (given.size() != mdp.n_states()) throw ModelError("start distribution size mismatch");
    return given;
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(mdp.n_states());
  int count = 0;
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (!mdp.terminal(s)) {
      d[s] = 1.0;
      ++count;
    }
  }
  if (count == 0) throw ModelError("no non-terminal start state");
  return d / count;
}

Policy OptimalPolicy(const TabularMdp& mdp) {
  return GreedyPolicy(ValueIteration(mdp, 1e-11));
}

}  // namespace

EnvelopeCheck EnvelopeDerivativeCheck(const TabularMdp& mdp,
                                      const Eigen::VectorXd& potential,
                                      const Eigen::VectorXd& energy_per_action,
                                      double lambda, double delta,
                                      const Eigen::VectorXd& start_dist) {
  if (!(delta > 0.0)) throw ModelError("EnvelopeDerivativeCheck: delta must be positive");
  const Eigen::VectorXd d0 = StartDistribution(mdp, start_dist);
  const TabularMdp m0 = EmbedShapedMdp(mdp, potential, lambda, energy_per_action);
  const TabularMdp m1 = EmbedShapedMdp(mdp, potential, lambda + delta, energy_per_action);
  const Policy p0 = OptimalPolicy(m0);
  const Policy p1 = OptimalPolicy(m1);
  const double j0 = d0.dot(EvaluatePolicy(m0, p0));
  const double j1 = d0.dot(EvaluatePolicy(m1, p1));

  Eigen::MatrixXd energy(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) energy.row(s) = energy_per_action.transpose();
  const double discounted_energy = d0.dot(EvaluatePolicyReward(mdp, p0, energy));

  EnvelopeCheck out;
  out.finite_diff = (j1 - j0) / delta;
  out.expected = -discounted_energy;
  out.policy_constant = p0 == p1;
  return out;
}

double ApproxPotentialBound(double epsilon, double gamma, double alpha_energy) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ModelError("ApproxPotentialBound: epsilon must lie in [0, 1)");
  }
  return 2.0 * gamma * alpha_energy * epsilon / ((1.0 - gamma) * (1.0 - epsilon));
}

ApproxGapReport ApproxPotentialGapCheck(const TabularMdp& mdp,
                                        const Eigen::VectorXd& true_potential,
                                        double alpha_energy, double delta_bound,
                                        int trials, uint64_t seed,
                                        const Eigen::VectorXd& start_dist) {
  if (!(delta_bound >= 0.0)) throw ModelError("ApproxPotentialGapCheck: delta must be >= 0");
  if (trials < 1) throw ModelError("ApproxPotentialGapCheck: trials must be >= 1");
  const int ns = mdp.n_states();
  if (true_potential.size() != ns) throw ModelError("ApproxPotentialGapCheck: size mismatch");
  const Eigen::VectorXd d0 = StartDistribution(mdp, start_dist);
  const Eigen::VectorXd no_energy = Eigen::VectorXd::Zero(mdp.n_actions());

  const TabularMdp complete =
      EmbedShapedMdp(mdp, alpha_energy * true_potential, 0.0, no_energy);
  const Policy pi_complete = OptimalPolicy(complete);
  const double j_complete = d0.dot(EvaluatePolicy(mdp, pi_complete));

  ApproxGapReport report;
  report.trials = trials;
  const double phi_norm = true_potential.cwiseAbs().maxCoeff();
  report.epsilon = phi_norm > 0.0 ? delta_bound / phi_norm : 0.0;
  report.bound_value = report.epsilon < 1.0
                           ? ApproxPotentialBound(report.epsilon, mdp.gamma(), alpha_energy)
                           : std::numeric_limits<double>::infinity();
  report.absolute_only = std::abs(j_complete) < 1e-12;

  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd approx = true_potential;
    for (int s = 0; s < ns; ++s) {
      const double noise = std::clamp(rng.Normal(0.0, delta_bound), -delta_bound, delta_bound);
      approx[s] += noise;
    }
    const TabularMdp shaped = EmbedShapedMdp(mdp, alpha_energy * approx, 0.0, no_energy);
    const Policy pi_approx = OptimalPolicy(shaped);
    const double j_approx = d0.dot(EvaluatePolicy(mdp, pi_approx));
    const double gap = std::abs(j_complete - j_approx);
    report.worst_absolute_gap = std::max(report.worst_absolute_gap, gap);
    if (!report.absolute_only) {
      report.worst_relative_gap = std::max(report.worst_relative_gap, gap / std::abs(j_complete));
    }
  }
  if (report.absolute_only) report.worst_relative_gap = report.worst_absolute_gap;

  std::ostringstream note;
  note << "closed-form bound " << report.bound_value << " at eps=" << report.epsilon
       << ", gamma=" << mdp.gamma() << ", alpha_energy=" << alpha_energy
       << "; measured worst gap " << report.worst_relative_gap
       << (report.absolute_only ? " (absolute, |J| < 1e-12)" : " (relative)")
       << ". Reference point eps=0.2, gamma=0.99, alpha_energy=0.01 evaluates to "
       << ApproxPotentialBound(0.2, 0.99, 0.01)
       << ", which is not below the commonly quoted 5% loss figure.";
  report.note = note.str();
  return report;
}

double AccelerationRatio(std::span<const double> energy_potential_deltas,
                         std::span<const double> task_rewards) {
  double energy_sum = 0.0;
  for (double d : energy_potential_deltas) energy_sum += std::abs(d);
  double task_sum = 0.0;
  int task_count = 0;
  for (double r : task_rewards) {
    if (r != 0.0) {
      task_sum += std::abs(r);
      ++task_count;
    }
  }
  if (task_count == 0 || energy_potential_deltas.empty()) return 0.0;
  return (energy_sum / energy_potential_deltas.size()) / (task_sum / task_count);
}

}  // namespace hears
