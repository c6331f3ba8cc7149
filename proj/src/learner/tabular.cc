#include "hears/learner/tabular.h"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hears {

int MdpSampler::Reset(Rng& rng) {
  if (start_ >= 0) return start_;
  std::vector<int> open;
  for (int s = 0; s < mdp_.n_states(); ++s) {
    if (!mdp_.terminal(s)) open.push_back(s);
  }
  return open[rng.UniformInt(static_cast<int>(open.size()))];
}

TabularStep MdpSampler::Step(int s, int a, Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  int next = mdp_.n_states() - 1;
  for (int t = 0; t < mdp_.n_states(); ++t) {
    acc += mdp_.P(s, a, t);
    if (u < acc) {
      next = t;
      break;
    }
  }
  // rounding can leave u above the last partial sum; use the last state with mass
  if (mdp_.P(s, a, next) == 0.0) {
    for (int t = mdp_.n_states(); t-- > 0;) {
      if (mdp_.P(s, a, t) > 0.0) {
        next = t;
        break;
      }
    }
  }
  return {next, mdp_.R(s, a, next), mdp_.terminal(next)};
}

Policy GreedyFromQ(const Eigen::MatrixXd& q) {
  Policy p(q.rows(), 0);
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = static_cast<int>(a);
    }
    p[s] = best;
  }
  return p;
}

double GridNavGreedyReturn(const GridNav& grid, const Eigen::MatrixXd& q) {
  const Policy p = GreedyFromQ(q);
  int s = grid.start();
  double discount = 1.0;
  Rng unused(0);
  for (int t = 0; t < grid.max_steps(); ++t) {
    const auto o = grid.Step(s, p[s], unused);
    if (o.terminal) return discount * o.reward;
    discount *= grid.gamma();
    s = o.next;
  }
  return 0.0;
}

QLearningResult TabularQLearning(TabularEnv& env, const TabularShaping& shaping,
                                 const QLearningConfig& config, uint64_t seed,
                                 const OptimalityCheck& check) {
  const auto t0 = std::chrono::steady_clock::now();
  const int ns = env.n_states(), na = env.n_actions();
  const double gamma = env.gamma();
  if (shaping.enabled) {
    if (shaping.potential.size() != ns || shaping.action_energy.size() != na) {
      throw ModelError("TabularQLearning: shaping tables have wrong size");
    }
  }
  auto phi = [&](int s) {
    if (!shaping.enabled) return 0.0;
    if (!shaping.terminal.empty() && shaping.terminal[s]) return 0.0;
    return shaping.potential[s];
  };
  QLearningResult out;
  out.record.seed = seed;
  out.q = Eigen::MatrixXd::Constant(ns, na, config.q_init);
  Eigen::MatrixXi visits = Eigen::MatrixXi::Zero(ns, na);
  Rng rng(seed);
  std::vector<int> ties;
  ties.reserve(na);
  int64_t steps = 0;
  for (int ep = 0; ep < config.episodes; ++ep) {
    if (config.max_total_steps > 0 && steps >= config.max_total_steps) break;
    const double frac =
        config.epsilon_decay_episodes > 0
            ? std::min(1.0, static_cast<double>(ep) / config.epsilon_decay_episodes)
            : 1.0;
    const double eps = config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac;
    EpisodeStats st;
    st.episode = ep;
    int s = env.Reset(rng);
    for (int t = 0; t < env.max_steps(); ++t) {
      if (config.max_total_steps > 0 && steps >= config.max_total_steps) break;
      int a;
      if (rng.Uniform() < eps) {
        a = rng.UniformInt(na);
      } else {
        ties.clear();
        double best = out.q(s, 0);
        for (int b = 0; b < na; ++b) {
          const double v = out.q(s, b);
          if (v > best) {
            best = v;
            ties.clear();
          }
          if (v == best) ties.push_back(b);
        }
        a = ties.size() == 1 ? ties[0] : ties[rng.UniformInt(static_cast<int>(ties.size()))];
      }
      const TabularStep o = env.Step(s, a, rng);
      double r = o.reward;
      if (shaping.enabled) {
        const double phi_next = o.terminal ? 0.0 : phi(o.next);
        r = ShapedReward(o.reward, phi(s), phi_next, shaping.action_energy[a], gamma,
                         shaping.lambda);
      }
      const double target = o.terminal ? r : r + gamma * out.q.row(o.next).maxCoeff();
      const int n = ++visits(s, a);
      const double alpha =
          config.alpha_power > 0.0 ? config.alpha0 / std::pow(1.0 + n, config.alpha_power)
                                   : config.alpha0;
      out.q(s, a) += alpha * (target - out.q(s, a));
      if (!(std::abs(out.q(s, a)) <= 1e6)) {
        std::ostringstream msg;
        msg << "TabularQLearning: Q diverged at episode " << ep << " step " << t << " s=" << s
            << " a=" << a << " q=" << out.q(s, a) << " target=" << target;
        throw SimulationError(msg.str());
      }
      st.base_return += o.reward;
      st.shaped_return += r;
      ++st.length;
      ++steps;
      s = o.next;
      if (o.terminal) {
        st.terminal = true;
        break;
      }
    }
    out.record.episodes.push_back(st);
    if (check && !out.record.episodes_to_optimal && check(out.q)) {
      out.record.episodes_to_optimal = ep + 1;
      if (config.stop_when_optimal) break;
    }
  }
  out.record.total_steps = steps;
  out.greedy = GreedyFromQ(out.q);
  out.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace hears
