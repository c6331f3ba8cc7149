#include "hears/mdp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hears/rng.h"

namespace hears {

TabularMdp::TabularMdp(int n_states, int n_actions,
                       std::vector<double> transition,
                       std::vector<double> reward, double gamma,
                       std::vector<char> terminal)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      terminal_(std::move(terminal)) {
  if (n_states_ < 1 || n_actions_ < 1) {
    throw ModelError("TabularMdp: need at least one state and one action");
  }
  const size_t n = static_cast<size_t>(n_states_) * n_actions_ * n_states_;
  if (transition_.size() != n || reward_.size() != n) {
    throw ModelError("TabularMdp: tensor size mismatch");
  }
  if (terminal_.empty()) terminal_.assign(n_states_, 0);
  if (terminal_.size() != static_cast<size_t>(n_states_)) {
    throw ModelError("TabularMdp: terminal mask size mismatch");
  }
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ModelError("TabularMdp: gamma must lie in (0, 1)");
  }
  expected_reward_.assign(static_cast<size_t>(n_states_) * n_actions_, 0.0);
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      double row = 0.0;
      double er = 0.0;
      for (int t = 0; t < n_states_; ++t) {
        const double p = P(s, a, t);
        const double r = R(s, a, t);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ModelError("TabularMdp: probability outside [0,1] at s=" +
                           std::to_string(s) + " a=" + std::to_string(a));
        }
        if (!std::isfinite(r)) {
          throw ModelError("TabularMdp: non-finite reward at s=" +
                           std::to_string(s) + " a=" + std::to_string(a));
        }
        row += p;
        er += p * r;
      }
      if (std::abs(row - 1.0) > 1e-9) {
        throw ModelError("TabularMdp: row (" + std::to_string(s) + "," +
                         std::to_string(a) + ") sums to " + std::to_string(row));
      }
      if (terminal_[s]) {
        for (int t = 0; t < n_states_; ++t) {
          const double want = t == s ? 1.0 : 0.0;
          if (std::abs(P(s, a, t) - want) > 1e-12 || R(s, a, t) != 0.0) {
            throw ModelError("TabularMdp: terminal state " + std::to_string(s) +
                             " must self-loop with zero reward");
          }
        }
      }
      expected_reward_[s * n_actions_ + a] = er;
    }
  }
}

TabularMdp TabularMdp::WithReward(std::vector<double> reward) const {
  return TabularMdp(n_states_, n_actions_, transition_, std::move(reward),
                    gamma_, terminal_);
}

namespace {

// q(s,a) = r(s,a) + gamma sum_s' P v(s')
Eigen::MatrixXd Backup(const TabularMdp& mdp, const Eigen::VectorXd& v) {
  const int ns = mdp.n_states();
  const int na = mdp.n_actions();
  Eigen::MatrixXd q(ns, na);
  const double* p = mdp.transition().data();
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      double acc = 0.0;
      const double* row = p + mdp.Index(s, a, 0);
      for (int t = 0; t < ns; ++t) acc += row[t] * v[t];
      q(s, a) = mdp.ExpectedReward(s, a) + mdp.gamma() * acc;
    }
  }
  return q;
}

void CheckPolicy(const TabularMdp& mdp, const Policy& policy) {
  if (policy.size() != static_cast<size_t>(mdp.n_states())) {
    throw ModelError("policy size does not match n_states");
  }
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (policy[s] < 0 || policy[s] >= mdp.n_actions()) {
      if (mdp.terminal(s)) continue;
      throw ModelError("policy undefined at non-terminal state " + std::to_string(s));
    }
  }
}

Eigen::VectorXd SolveLinear(const TabularMdp& mdp, const Eigen::MatrixXd& p_pi,
                            const Eigen::VectorXd& r_pi, double tol) {
  const int ns = mdp.n_states();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(ns, ns) - mdp.gamma() * p_pi;
  Eigen::VectorXd v = a.partialPivLu().solve(r_pi);
  // one refinement step keeps the residual near machine precision
  Eigen::VectorXd res = r_pi + mdp.gamma() * (p_pi * v) - v;
  v += a.partialPivLu().solve(res);
  res = r_pi + mdp.gamma() * (p_pi * v) - v;
  const double residual = res.cwiseAbs().maxCoeff();
  if (!(residual <= tol)) {
    throw SolverError("policy evaluation did not reach tolerance", residual, 1);
  }
  return v;
}

}  // namespace

double BellmanResidual(const TabularMdp& mdp, const Eigen::VectorXd& v) {
  Eigen::MatrixXd q = Backup(mdp, v);
  return (q.rowwise().maxCoeff() - v).cwiseAbs().maxCoeff();
}

ValueTable ValueIteration(const TabularMdp& mdp, double tol, int max_iters) {
  if (!(tol > 0.0)) throw ModelError("ValueIteration: tol must be positive");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.n_states());
  double residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::MatrixXd q = Backup(mdp, v);
    Eigen::VectorXd next = q.rowwise().maxCoeff();
    residual = (next - v).cwiseAbs().maxCoeff();
    if (residual <= tol) {
      ValueTable out;
      out.q = std::move(q);
      out.v = std::move(next);
      out.residual = residual;
      out.iterations = it;
      return out;
    }
    v = std::move(next);
  }
  throw SolverError("value iteration did not converge", residual, max_iters);
}

Policy GreedyPolicy(const ValueTable& values) {
  const auto& q = values.q;
  Policy policy(q.rows(), 0);
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = static_cast<int>(a);
    }
    policy[s] = best;
  }
  return policy;
}

Eigen::VectorXd EvaluatePolicy(const TabularMdp& mdp, const Policy& policy,
                               double tol) {
  CheckPolicy(mdp, policy);
  const int ns = mdp.n_states();
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(ns);
  for (int s = 0; s < ns; ++s) {
    const int a = mdp.terminal(s) ? 0 : policy[s];
    for (int t = 0; t < ns; ++t) p_pi(s, t) = mdp.P(s, a, t);
    r_pi[s] = mdp.ExpectedReward(s, a);
  }
  return SolveLinear(mdp, p_pi, r_pi, tol);
}

Eigen::VectorXd EvaluatePolicy(const TabularMdp& mdp,
                               const Eigen::MatrixXd& action_probs, double tol) {
  const int ns = mdp.n_states();
  const int na = mdp.n_actions();
  if (action_probs.rows() != ns || action_probs.cols() != na) {
    throw ModelError("EvaluatePolicy: action_probs has wrong shape");
  }
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(ns);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const double w = action_probs(s, a);
      if (w == 0.0) continue;
      for (int t = 0; t < ns; ++t) p_pi(s, t) += w * mdp.P(s, a, t);
      r_pi[s] += w * mdp.ExpectedReward(s, a);
    }
  }
  return SolveLinear(mdp, p_pi, r_pi, tol);
}

Eigen::VectorXd EvaluatePolicyReward(const TabularMdp& mdp, const Policy& policy,
                                     const Eigen::MatrixXd& reward_sa,
                                     double tol) {
  CheckPolicy(mdp, policy);
  const int ns = mdp.n_states();
  if (reward_sa.rows() != ns || reward_sa.cols() != mdp.n_actions()) {
    throw ModelError("EvaluatePolicyReward: reward has wrong shape");
  }
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(ns);
  for (int s = 0; s < ns; ++s) {
    const int a = mdp.terminal(s) ? 0 : policy[s];
    for (int t = 0; t < ns; ++t) p_pi(s, t) = mdp.P(s, a, t);
    r_pi[s] = mdp.terminal(s) ? 0.0 : reward_sa(s, a);
  }
  return SolveLinear(mdp, p_pi, r_pi, tol);
}

TabularMdp RandomMdp(uint64_t seed, int n_states, int n_actions,
                     double reward_scale, double gamma) {
  if (n_states < 2 || n_actions < 2) {
    throw ModelError("RandomMdp: need n_states >= 2 and n_actions >= 2");
  }
  Rng rng(seed);
  const size_t n = static_cast<size_t>(n_states) * n_actions * n_states;
  std::vector<double> p(n);
  std::vector<double> r(n);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const size_t base = (static_cast<size_t>(s) * n_actions + a) * n_states;
      double total = 0.0;
      for (int t = 0; t < n_states; ++t) {
        const double e = -std::log(1.0 - rng.Uniform());
        p[base + t] = e;
        total += e;
      }
      for (int t = 0; t < n_states; ++t) p[base + t] /= total;
      // renormalise against rounding so rows sum to 1 within 1e-15
      double sum = 0.0;
      for (int t = 0; t + 1 < n_states; ++t) sum += p[base + t];
      p[base + n_states - 1] = std::max(0.0, 1.0 - sum);
      for (int t = 0; t < n_states; ++t) {
        r[base + t] = rng.Uniform(-reward_scale, reward_scale);
      }
    }
  }
  return TabularMdp(n_states, n_actions, std::move(p), std::move(r), gamma,
                    std::vector<char>(n_states, 0));
}

}  // namespace hears
