#include "hears/harness/verify.h"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "hears/envs/hopper.h"
#include "hears/envs/lander.h"
#include "hears/envs/pendulum.h"
#include "hears/envs/registry.h"
#include "hears/envs/vehicle.h"
#include "hears/harness/config.h"
#include "hears/harness/experiment.h"
#include "hears/harness/metrics.h"
#include "hears/learner/probe.h"
#include "hears/mdp.h"
#include "hears/nn.h"
#include "hears/shaping.h"

namespace hears {

namespace {

CheckResult Result(int id, const std::string& name, bool passed, const std::string& detail) {
  CheckResult r;
  r.id = id;
  r.name = name;
  r.passed = passed;
  r.detail = detail;
  return r;
}

Eigen::VectorXd RandomVector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.Uniform(lo, hi);
  return v;
}

// sizes cycle through 5..12 states and 2..4 actions
TabularMdp SuiteMdp(int i) {
  return RandomMdp(1000 + i, 5 + i % 8, 2 + i % 3, 1.0, 0.9);
}

std::vector<uint64_t> SeedRange(uint64_t first, int n, uint64_t stride) {
  std::vector<uint64_t> s;
  for (int i = 0; i < n; ++i) s.push_back(first + stride * i);
  return s;
}

}  // namespace

CheckResult RunCheck(const CheckSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = spec.run();
  } catch (const std::exception& e) {
    r = Result(spec.id, spec.name, false, std::string("exception: ") + e.what());
  }
  r.id = spec.id;
  r.name = spec.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.limit_seconds = spec.limit_seconds;
  if (spec.limit_seconds > 0 && r.seconds > spec.limit_seconds) {
    r.passed = false;
    std::ostringstream os;
    os << r.detail << " [runtime " << r.seconds << " s exceeds " << spec.limit_seconds << " s]";
    r.detail = os.str();
  }
  return r;
}

std::string FormatCheck(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail
     << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

// ---------------------------------------------------------------------------
// 1, 2: invariance and value shift on random MDPs

CheckResult CheckPolicyInvariance(int n_mdps, int n_potentials) {
  int mismatches = 0, comparisons = 0;
  Rng rng(77);
  for (int i = 0; i < n_mdps; ++i) {
    const TabularMdp m = SuiteMdp(i);
    const double lambda = rng.Uniform(0.0, 0.5);
    const Eigen::VectorXd energy = RandomVector(rng, m.n_actions(), 0.0, 2.0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m.n_states());
    const Policy base = GreedyPolicy(ValueIteration(EmbedShapedMdp(m, zero, lambda, energy)));
    for (int k = 0; k < n_potentials; ++k) {
      const Eigen::VectorXd phi =
          SanitizePotential(m, RandomVector(rng, m.n_states(), -5.0, 5.0), 5.0);
      const Policy shaped = GreedyPolicy(ValueIteration(EmbedShapedMdp(m, phi, lambda, energy)));
      for (size_t s = 0; s < base.size(); ++s) {
        ++comparisons;
        if (base[s] != shaped[s]) ++mismatches;
      }
    }
  }
  std::ostringstream os;
  os << n_mdps << " MDPs x " << n_potentials << " potentials, " << comparisons
     << " state comparisons, " << mismatches << " mismatches";
  return Result(1, "policy invariance", mismatches == 0, os.str());
}

CheckResult CheckValueShift(int n_mdps, int n_potentials) {
  double worst = 0.0;
  Rng rng(78);
  for (int i = 0; i < n_mdps; ++i) {
    const TabularMdp m = SuiteMdp(i);
    const double lambda = rng.Uniform(0.0, 0.5);
    const Eigen::VectorXd energy = RandomVector(rng, m.n_actions(), 0.0, 2.0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m.n_states());
    const TabularMdp m_lambda = EmbedShapedMdp(m, zero, lambda, energy);
    // exact values of the greedy policies
    const Eigen::VectorXd v_lambda =
        EvaluatePolicy(m_lambda, GreedyPolicy(ValueIteration(m_lambda)));
    for (int k = 0; k < n_potentials; ++k) {
      const Eigen::VectorXd phi =
          SanitizePotential(m, RandomVector(rng, m.n_states(), -5.0, 5.0), 5.0);
      const TabularMdp shaped = EmbedShapedMdp(m, phi, lambda, energy);
      const Eigen::VectorXd v_shaped = EvaluatePolicy(shaped, GreedyPolicy(ValueIteration(shaped)));
      // shaped values sit below the regularized ones by exactly Phi
      worst = std::max(worst, (v_shaped + phi - v_lambda).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream os;
  os << "sup |V*_shaped + Phi - V*_lambda| = " << worst << " (tolerance 1e-8)";
  return Result(2, "value shift", worst <= 1e-8, os.str());
}

// ---------------------------------------------------------------------------
// 3: reward bound

CheckResult CheckRewardBound(int samples) {
  const double lmax_op = LambdaMax(10.0, 0.99, 1.0, 100.0);
  const bool op_ok = lmax_op >= 0.050 && lmax_op <= 0.051;

  // shaped rewards of uniformly sampled transitions on random MDPs whose
  // rewards lie in [-R_max, R_max], with potentials drawn wide and clipped
  const double r_max = 10.0, phi_max = 1.0, gamma = 0.99;
  Rng rng(31);
  std::vector<double> rewards;
  rewards.reserve(samples);
  double max_energy = 0.0, lambda_used = 0.0;
  int stated_flags = 0, exact_flags = 0;
  double worst_excess = -1e300;
  const int per_mdp = 1000;
  for (int i = 0; static_cast<int>(rewards.size()) < samples; ++i) {
    const TabularMdp m = RandomMdp(5000 + i, 8, 3, r_max, gamma);
    const Eigen::VectorXd energy = RandomVector(rng, m.n_actions(), 0.0, 3.0);
    const Eigen::VectorXd phi =
        SanitizePotential(m, RandomVector(rng, m.n_states(), -2.0 * phi_max, 2.0 * phi_max), phi_max);
    ShapingConfig cfg;
    cfg.gamma = gamma;
    cfg.r_max = r_max;
    cfg.phi_max = phi_max;
    cfg.mean_action_energy = energy.mean();
    cfg.lambda = rng.Uniform(0.0, 1.0) * LambdaMax(cfg);
    lambda_used = std::max(lambda_used, cfg.lambda);
    const double e_max = energy.maxCoeff();
    max_energy = std::max(max_energy, e_max);
    const double limit = AdditiveRewardBound(cfg, e_max);
    const double exact_limit = r_max + (1.0 + gamma) * phi_max + cfg.lambda * e_max;
    for (int k = 0; k < per_mdp && static_cast<int>(rewards.size()) < samples; ++k) {
      const int s = rng.UniformInt(m.n_states());
      const int a = rng.UniformInt(m.n_actions());
      const int s2 = rng.UniformInt(m.n_states());
      const double r = ShapedReward(m.R(s, a, s2), phi[s], phi[s2], energy[a], gamma, cfg.lambda);
      rewards.push_back(r);
      if (std::abs(r) > limit) ++stated_flags;
      if (std::abs(r) > exact_limit) ++exact_flags;
      worst_excess = std::max(worst_excess, std::abs(r) - limit);
    }
  }
  std::ostringstream os;
  os << "lambda_max(10, 0.99, 1, 100) = " << lmax_op << (op_ok ? " in" : " outside")
     << " [0.050, 0.051]; " << rewards.size() << " shaped rewards, " << stated_flags
     << " above R_max + 2 gamma Phi_max + lambda max E, " << exact_flags
     << " above R_max + (1 + gamma) Phi_max + lambda max E; worst margin "
     << -worst_excess;
  return Result(3, "reward bound", op_ok && stated_flags == 0, os.str());
}

// ---------------------------------------------------------------------------
// 4: envelope derivative

CheckResult CheckEnvelopeDerivative(int n_mdps) {
  Rng rng(41);
  double worst = 0.0;
  int used = 0, nonconstant_skips = 0, violations = 0;
  for (int i = 0; i < n_mdps; ++i) {
    const TabularMdp m = RandomMdp(4000 + i, 6, 3, 1.0, 0.9);
    const Eigen::VectorXd energy = RandomVector(rng, m.n_actions(), 0.0, 1.0);
    const Eigen::VectorXd phi = RandomVector(rng, m.n_states(), -1.0, 1.0);
    bool done = false;
    // walk lambda until the optimal policy is constant over [l, l + d]
    for (double lambda = 0.05; lambda < 5.0 && !done; lambda *= 1.37) {
      const EnvelopeCheck c = EnvelopeDerivativeCheck(m, phi, energy, lambda, 1e-4);
      if (!c.policy_constant) {
        ++nonconstant_skips;
        continue;
      }
      const double err = std::abs(c.finite_diff - c.expected);
      if (err > 1e-6 * std::abs(c.expected) + 1e-9) ++violations;
      if (std::abs(c.expected) > 0.0) worst = std::max(worst, err / std::abs(c.expected));
      ++used;
      done = true;
    }
  }
  std::ostringstream os;
  os << used << "/" << n_mdps << " MDPs checked, worst relative error " << worst
     << " (tolerance 1e-6 relative + 1e-9), " << violations << " violations, " << nonconstant_skips
     << " lambda values skipped as policy switches";
  return Result(4, "envelope derivative", used == n_mdps && violations == 0, os.str());
}

// ---------------------------------------------------------------------------
// 5: approximate potential report

CheckResult CheckApproxPotentialReport() {
  double worst_gap = 0.0;
  std::string note;
  for (int i = 0; i < 20; ++i) {
    const TabularMdp m = RandomMdp(6000 + i, 8, 3, 1.0, 0.9);
    Rng rng(600 + i);
    const Eigen::VectorXd phi = RandomVector(rng, m.n_states(), -1.0, 1.0);
    const ApproxGapReport rep = ApproxPotentialGapCheck(m, phi, 0.5, 0.2, 20, 99 + i);
    worst_gap = std::max(worst_gap, rep.worst_relative_gap);
    note = rep.note;
  }
  const double bound = ApproxPotentialBound(0.2, 0.99, 0.01);
  const bool bound_ok = std::abs(bound - 0.495) <= 1e-3;
  const bool note_ok = note.find("5%") != std::string::npos;
  std::ostringstream os;
  os << "tabular lambda=0 worst gap " << worst_gap << "; bound(0.2, 0.99, 0.01) = " << bound
     << "; report: " << note;
  return Result(5, "approximate potential report", worst_gap == 0.0 && bound_ok && note_ok,
                os.str());
}

// ---------------------------------------------------------------------------
// 6: energy conservation

CheckResult CheckEnergyConservation() {
  PendulumOptions o;
  o.damping = 0.0;
  o.dt = 0.01;
  o.max_steps = 1 << 30;
  Pendulum env(o);
  EnvState s;
  s.q = {2.0};
  s.q_dot = {0.0};
  const double e0 = TotalEnergy(env.energy(), s);
  double drift = 0.0;
  const double zero[1] = {0.0};
  for (int t = 0; t < 10000; ++t) {
    s = env.Step(s, zero).next;
    drift = std::max(drift, std::abs(TotalEnergy(env.energy(), s) - e0) / e0);
  }
  std::ostringstream os;
  os << "max relative energy drift over 1e4 steps at dt=0.01: " << drift << " (limit 1e-4)";
  return Result(6, "energy conservation", drift <= 1e-4, os.str());
}

// ---------------------------------------------------------------------------
// 7: gradients

CheckResult CheckGradients(int n_nets) {
  Rng rng(71);
  double worst = 0.0;
  for (int n = 0; n < n_nets; ++n) {
    const int in = 1 + rng.UniformInt(5), h1 = 2 + rng.UniformInt(8), h2 = 2 + rng.UniformInt(8);
    const int out = 1 + rng.UniformInt(3);
    Mlp net({in, h1, h2, out}, Activation::kTanh,
            n % 2 ? Activation::kTanh : Activation::kIdentity);
    net.InitRandom(rng);
    for (double& p : net.params()) p += rng.Uniform(-0.1, 0.1);  // nonzero biases
    const Eigen::VectorXd x = RandomVector(rng, in, -1.0, 1.0);
    const Eigen::VectorXd w = RandomVector(rng, out, -1.0, 1.0);
    // loss = w . f(x)
    Mlp::Cache cache;
    net.Forward(x, &cache);
    std::vector<double> grad(net.n_params(), 0.0);
    net.Backward(cache, w, grad);
    const double h = 1e-6;
    for (size_t i = 0; i < net.n_params(); ++i) {
      const double keep = net.params()[i];
      net.params()[i] = keep + h;
      const double lp = w.dot(net.Forward(x));
      net.params()[i] = keep - h;
      const double lm = w.dot(net.Forward(x));
      net.params()[i] = keep;
      const double fd = (lp - lm) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-5});
      worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    }
  }
  std::ostringstream os;
  os << n_nets << " random nets, max relative error " << worst << " (limit 1e-4)";
  return Result(7, "gradient correctness", worst <= 1e-4, os.str());
}

// ---------------------------------------------------------------------------
// 8: shaping-off identity

CheckResult CheckShapingOffIdentity() {
  int tab_ok = 0, ac_ok = 0;
  std::ostringstream os;
  for (uint64_t seed : {12345ULL, 22345ULL, 32345ULL}) {
    const TabularMdp m = RandomMdp(seed, 8, 3, 1.0, 0.95);
    MdpSampler env(m, -1, 40);
    TabularShaping zero;
    zero.enabled = true;
    zero.potential = Eigen::VectorXd::Zero(m.n_states());
    zero.action_energy = Eigen::VectorXd::Ones(m.n_actions());
    zero.lambda = 0.0;
    TabularShaping off;
    QLearningConfig q;
    q.episodes = 200;
    std::vector<Eigen::MatrixXd> traj_a, traj_b;
    auto rec_a = [&](const Eigen::MatrixXd& x) { traj_a.push_back(x); return false; };
    auto rec_b = [&](const Eigen::MatrixXd& x) { traj_b.push_back(x); return false; };
    const auto a = TabularQLearning(env, zero, q, seed, rec_a);
    const auto b = TabularQLearning(env, off, q, seed, rec_b);
    bool same = traj_a.size() == traj_b.size();
    for (size_t i = 0; same && i < traj_a.size(); ++i) same = (traj_a[i].array() == traj_b[i].array()).all();
    same = same && a.record.BaseReturns() == b.record.BaseReturns();
    if (same) ++tab_ok;
  }
  for (uint64_t seed : {12345ULL, 22345ULL, 32345ULL}) {
    AcConfig c;
    c.episodes = 3;
    c.max_steps = 100;
    c.warmup_steps = 64;
    c.batch_size = 32;
    std::vector<std::vector<double>> pa, pb;
    AcHooks ha, hb;
    ha.on_update = [&](const ActorCritic& ag) {
      auto v = ag.actor().params();
      v.insert(v.end(), ag.critic().params().begin(), ag.critic().params().end());
      pa.push_back(std::move(v));
    };
    hb.on_update = [&](const ActorCritic& ag) {
      auto v = ag.actor().params();
      v.insert(v.end(), ag.critic().params().begin(), ag.critic().params().end());
      pb.push_back(std::move(v));
    };
    ShapingSetup zero;
    zero.enabled = true;
    Pendulum e1, e2;
    const auto ra = ActorCriticTrain(e1, zero, c, seed, ha);
    const auto rb = ActorCriticTrain(e2, ShapingSetup::Vanilla(), c, seed, hb);
    if (!pa.empty() && pa == pb && ra.record.BaseReturns() == rb.record.BaseReturns()) ++ac_ok;
  }
  os << "tabular " << tab_ok << "/3 seeds bit-identical, actor-critic " << ac_ok
     << "/3 seeds bit-identical";
  return Result(8, "shaping-off identity", tab_ok == 3 && ac_ok == 3, os.str());
}

// ---------------------------------------------------------------------------
// 9: GridNav acceleration

GridNavStudy DefaultGridNavStudy() {
  GridNavStudy s;
  s.grid.size = 20;
  s.grid.gamma = 0.99;
  s.grid.max_steps = 2000;
  s.shaping.enabled = true;
  s.shaping.alpha_task = 1.0;
  s.shaping.alpha_energy = 0.0;
  s.shaping.lambda = 0.0;
  s.q.episodes = 400;
  s.q.alpha0 = 0.5;
  s.q.epsilon_start = 1.0;
  s.q.epsilon_end = 0.05;
  s.q.epsilon_decay_episodes = 50;
  s.seeds = SeedRange(1, 20, 1);
  return s;
}

CheckResult CheckGridNavAcceleration(const GridNavStudy& study) {
  const GridNavComparison c = CompareGridNav(study.grid, study.shaping, study.q, study.seeds);
  std::ostringstream os;
  os << "median episodes to 95%-optimal: shaped " << c.shaped_median << ", unshaped "
     << c.unshaped_median << ", ratio " << c.ratio << " (limit " << study.max_ratio << ") over "
     << study.seeds.size() << " paired seeds";
  return Result(9, "gridnav acceleration", c.ratio <= study.max_ratio, os.str());
}

// ---------------------------------------------------------------------------
// 10: oscillation suppression

OscillationStudy DefaultOscillationStudy() {
  OscillationStudy s;
  s.ac.episodes = 150;
  s.ac.warmup_steps = 500;
  s.ac.update_every = 2;
  s.ac.lr_actor = 1e-4;
  s.ac.sigma_decay_episodes = 100;
  s.regularized.alpha_task = 0.5;
  s.regularized.alpha_energy = 0.001;
  s.regularized.lambda = 0.05;
  s.unregularized = s.regularized;
  s.unregularized.lambda = 0.0;
  s.seeds = SeedRange(12345, 10, 10000);
  return s;
}

namespace {

struct PolicyEval {
  double mean_return = 0.0;
  double tv_per_step = 0.0;
};

PolicyEval EvaluateDeterministic(Env& env, const ActorCritic& agent, uint64_t seed, int starts) {
  PolicyEval out;
  Rng rng(seed ^ 0x51ed270b27a1ULL);
  double tv = 0.0;
  int steps = 0;
  for (int k = 0; k < starts; ++k) {
    const EnvState s0 = env.Reset(rng);
    const ProbeResult p = OscillationProbe(env, ActorMeanPolicy(agent), s0, env.max_steps());
    out.mean_return += p.base_return / starts;
    tv += p.action_total_variation;
    steps += std::max(0, p.steps - 1);
  }
  out.tv_per_step = steps > 0 ? tv / steps : 0.0;
  return out;
}

}  // namespace

CheckResult CheckOscillationSuppression(const OscillationStudy& study) {
  std::ostringstream os;
  // the alternating construction on the hopper
  HopperLite hopper;
  const ProbeResult alt =
      OscillationProbe(hopper, AlternatingPolicy(hopper.action_dim(), 1.0), hopper.Standing(),
                       study.probe_steps);
  const double ratio = alt.action_total_variation / std::max(alt.net_energy_change, 1e-300);
  const bool probe_ok = ratio >= study.probe_ratio;
  os << "alternating hopper policy: TV " << alt.action_total_variation << ", net |dE| "
     << alt.net_energy_change << " over " << alt.steps << " steps, ratio " << ratio << "; ";

  std::vector<double> ret_reg, ret_unreg, tv_reg, tv_unreg;
  for (uint64_t seed : study.seeds) {
    Lander2D env_a, env_b;
    const AcResult a = ActorCriticTrain(env_a, study.regularized, study.ac, seed);
    const AcResult b = ActorCriticTrain(env_b, study.unregularized, study.ac, seed);
    const PolicyEval ea = EvaluateDeterministic(env_a, a.agent, seed, study.eval_starts);
    const PolicyEval eb = EvaluateDeterministic(env_b, b.agent, seed, study.eval_starts);
    ret_reg.push_back(ea.mean_return);
    ret_unreg.push_back(eb.mean_return);
    tv_reg.push_back(ea.tv_per_step);
    tv_unreg.push_back(eb.tv_per_step);
  }
  const double mr = Median(ret_reg), mu = Median(ret_unreg);
  const double mtr = Median(tv_reg), mtu = Median(tv_unreg);
  const bool matched = std::abs(mr - mu) <= study.return_tolerance * std::max(std::abs(mr), std::abs(mu));
  const bool lower = mtr < mtu;
  os << "lander medians over " << study.seeds.size() << " seeds: lambda=" << study.regularized.lambda
     << " return " << mr << " TV/step " << mtr << "; lambda=0 return " << mu << " TV/step " << mtu
     << (matched ? " (returns within " : " (returns NOT within ") << study.return_tolerance * 100
     << "%)";
  return Result(10, "oscillation suppression", probe_ok && matched && lower, os.str());
}

// ---------------------------------------------------------------------------
// 11: vehicle analog

VehicleStudy DefaultVehicleStudy() {
  VehicleStudy s;
  s.ac.episodes = 60;
  s.ac.warmup_steps = 500;
  s.ac.update_every = 4;
  s.ac.lr_actor = 1e-4;  // residuals on a working controller; large steps random-walk the policy
  s.ac.sigma_decay_episodes = 15;
  s.ac.sigma_start = 0.3;
  s.ac.sigma_end = 0.05;
  const Preset p = FindPreset("vehicle");
  s.hears.alpha_task = p.alpha_task;
  s.hears.alpha_energy = p.alpha_energy;
  s.hears.lambda = p.lambda;
  s.seeds = SeedRange(12345, 5, 10000);
  s.train_max_steps = 1500;
  return s;
}

VehicleEvaluation EvaluateVehicle(const ActorCritic& agent) {
  auto env = MakeEnv("vehicle-test");
  auto* veh = dynamic_cast<BicycleVehicle*>(env.get());
  VehicleEvaluation ev;
  Rng rng(0);
  EnvState s = env->Reset(rng);
  const double v_target = veh->options().v_target;
  std::vector<double> cruise_speeds;
  double feas_sum = 0.0;
  const PolicyFn policy = ActorMeanPolicy(agent);
  for (int t = 0; t < env->max_steps(); ++t) {
    std::vector<double> a = policy(s, env->Observe(s), t);
    ClipAction(a);
    const StepResult res = env->Step(s, a);
    const VehicleStepInfo& info = veh->last_info();
    if (!info.inputs_within_bounds) ++ev.bound_violations;
    ev.min_feasibility = std::min(ev.min_feasibility, info.feasibility);
    feas_sum += info.feasibility;
    s = res.next;
    ++ev.steps;
    ev.max_abs_beta = std::max(ev.max_abs_beta, std::abs(veh->Sideslip(s)));
    if (!ev.reached_cruise && s.q_dot[0] >= 0.9 * v_target) ev.reached_cruise = true;
    if (ev.reached_cruise) cruise_speeds.push_back(s.q_dot[0]);
    if (res.terminal) {
      ev.finished = s.q[0] >= veh->road().length;
      break;
    }
  }
  ev.mean_feasibility = ev.steps > 0 ? feas_sum / ev.steps : 0.0;
  ev.speed_error_cv = cruise_speeds.size() > 1 ? CoefficientOfVariation(cruise_speeds)
                                               : std::numeric_limits<double>::infinity();
  return ev;
}

CheckResult CheckVehicleAnalog(const VehicleStudy& study) {
  std::vector<double> beta_h, beta_v, cv_h, cv_v;
  int violations = 0;
  double min_f = 1.0;
  AcConfig ac = study.ac;
  if (study.train_max_steps > 0) ac.max_steps = study.train_max_steps;
  for (uint64_t seed : study.seeds) {
    BicycleVehicle env_h, env_v;
    const AcResult h = ActorCriticTrain(env_h, study.hears, ac, seed);
    const AcResult v = ActorCriticTrain(env_v, ShapingSetup::Vanilla(), ac, seed);
    const VehicleEvaluation eh = EvaluateVehicle(h.agent);
    const VehicleEvaluation evv = EvaluateVehicle(v.agent);
    beta_h.push_back(eh.max_abs_beta);
    beta_v.push_back(evv.max_abs_beta);
    cv_h.push_back(eh.speed_error_cv);
    cv_v.push_back(evv.speed_error_cv);
    violations += eh.bound_violations + evv.bound_violations;
    min_f = std::min({min_f, eh.min_feasibility, evv.min_feasibility});
  }
  const double bh = Median(beta_h), bv = Median(beta_v), ch = Median(cv_h), cv = Median(cv_v);
  std::ostringstream os;
  os << "median over " << study.seeds.size() << " seeds on the 300 m test road: max|beta| "
     << bh * 180 / std::numbers::pi << " deg vs vanilla " << bv * 180 / std::numbers::pi
     << " deg; speed CV " << ch << "% vs " << cv << "%; input bound violations " << violations
     << "; min feasibility " << min_f;
  return Result(11, "vehicle analog", bh < bv && ch < cv && violations == 0, os.str());
}

// ---------------------------------------------------------------------------
// 12: discretization residual

namespace {

double PendulumResidual(double dt) {
  PendulumOptions o;
  o.dt = dt;
  o.damping = 0.1;
  o.max_steps = 1 << 30;
  Pendulum env(o);
  EnvState s;
  s.q = {1.0};
  s.q_dot = {0.5};
  EnergyTrace trace;
  const int steps = static_cast<int>(std::lround(2.0 / dt));
  trace.Push(TotalEnergy(env.energy(), s));
  for (int t = 0; t < steps; ++t) {
    const double a[1] = {0.4 * std::sin(0.5 * t * dt)};
    trace.energy_rate_dt.push_back(env.EnergyRate(s, a) * dt);
    s = env.Step(s, a).next;
    trace.Push(TotalEnergy(env.energy(), s));
  }
  return LyapunovHeuristicCheck(trace, dt).discretization_residual;
}

double VehicleResidual(double dt) {
  VehicleOptions o;
  o.dt = dt;
  BicycleVehicle env(o);
  Rng rng(0);
  EnvState s = env.Reset(rng);
  s.q_dot = {10.0, 0.1, 0.05};
  VehicleInputs u{0.02, 500.0, 1.0};
  EnergyTrace trace;
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  trace.Push(env.MechanicalEnergy(s));
  for (int t = 0; t < steps; ++t) {
    trace.energy_rate_dt.push_back(env.MechanicalEnergyRate(s, u) * dt);
    s = env.Integrate(s, u, dt);
    trace.Push(env.MechanicalEnergy(s));
  }
  return LyapunovHeuristicCheck(trace, dt).discretization_residual;
}

}  // namespace

CheckResult CheckLyapunovResidual() {
  const double p1 = PendulumResidual(0.02), p2 = PendulumResidual(0.01);
  const double v1 = VehicleResidual(0.02), v2 = VehicleResidual(0.01);
  const double rp = p1 / p2, rv = v1 / v2;
  std::ostringstream os;
  os << "pendulum residual " << p1 << " -> " << p2 << " (x" << rp << "), vehicle " << v1
     << " -> " << v2 << " (x" << rv << "), required x3";
  return Result(12, "lyapunov residual", rp >= 3.0 && rv >= 3.0, os.str());
}

// ---------------------------------------------------------------------------
// 13: ablation grid

CheckResult CheckAblationGrid() {
  struct Row {
    const char* name;
    double t, e, l;
  };
  const Row ant[] = {{"Vanilla", 0, 0, 0},
                     {"Energy Only", 0, 3e-2, 0},
                     {"Task Only", 5e-3, 0, 0},
                     {"Regularization Only", 0, 0, 1e-2},
                     {"Without Regularization", 5e-3, 3e-2, 0},
                     {"Without Energy", 5e-3, 0, 1e-2},
                     {"Without Task", 0, 3e-2, 1e-2},
                     {"Full", 5e-3, 3e-2, 1e-2}};
  const Row hop[] = {{"Vanilla", 0, 0, 0},
                     {"Energy Only", 0, 1e-3, 0},
                     {"Task Only", 5e-1, 0, 0},
                     {"Regularization Only", 0, 0, 5e-4},
                     {"Without Regularization", 5e-1, 1e-3, 0},
                     {"Without Energy", 5e-1, 0, 5e-4},
                     {"Without Task", 0, 1e-3, 5e-4},
                     {"Full", 5e-1, 1e-3, 5e-4}};
  int mismatches = 0;
  std::ostringstream os;
  auto check = [&](const char* preset, const Row* rows) {
    ExperimentConfig base;
    base.ApplyPreset(preset);
    const auto grid = AblationGrid(base);
    if (grid.size() != 8) {
      ++mismatches;
      return;
    }
    std::set<std::tuple<double, double, double>> seen;
    for (size_t i = 0; i < 8; ++i) {
      const auto& sh = grid[i].config.shaping;
      seen.insert({sh.alpha_task, sh.alpha_energy, sh.lambda});
      if (grid[i].name != rows[i].name || sh.alpha_task != rows[i].t ||
          sh.alpha_energy != rows[i].e || sh.lambda != rows[i].l) {
        ++mismatches;
        os << preset << " row '" << grid[i].name << "' mismatch; ";
      }
    }
    if (seen.size() != 8) {
      ++mismatches;
      os << preset << " has duplicate variants; ";
    }
    if (ToJson(grid[7].config) != ToJson(base)) {
      ++mismatches;
      os << preset << " Full differs from base; ";
    }
  };
  check("ant-table", ant);
  check("hopper-table", hop);
  ExperimentConfig base;
  base.ApplyPreset("ant-table");
  const auto& wt = AblationGrid(base)[6].config.shaping;
  os << "8 variants each for ant and hopper presets, " << mismatches
     << " mismatches; Ant Without Task = (" << wt.alpha_task << ", " << wt.alpha_energy << ", "
     << wt.lambda << ")";
  return Result(13, "ablation grid", mismatches == 0, os.str());
}

// ---------------------------------------------------------------------------

std::vector<CheckSpec> AllChecks() {
  return {
      {1, "policy invariance", 30.0, [] { return CheckPolicyInvariance(); }},
      {2, "value shift", 120.0, [] { return CheckValueShift(); }},
      {3, "reward bound", 60.0, [] { return CheckRewardBound(); }},
      {4, "envelope derivative", 60.0, [] { return CheckEnvelopeDerivative(); }},
      {5, "approximate potential report", 60.0, [] { return CheckApproxPotentialReport(); }},
      {6, "energy conservation", 60.0, [] { return CheckEnergyConservation(); }},
      {7, "gradient correctness", 60.0, [] { return CheckGradients(); }},
      {8, "shaping-off identity", 120.0, [] { return CheckShapingOffIdentity(); }},
      {9, "gridnav acceleration", 300.0,
       [] { return CheckGridNavAcceleration(DefaultGridNavStudy()); }},
      {10, "oscillation suppression", 900.0,
       [] { return CheckOscillationSuppression(DefaultOscillationStudy()); }},
      {11, "vehicle analog", 1800.0, [] { return CheckVehicleAnalog(DefaultVehicleStudy()); }},
      {12, "lyapunov residual", 60.0, [] { return CheckLyapunovResidual(); }},
      {13, "ablation grid", 10.0, [] { return CheckAblationGrid(); }},
  };
}

}  // namespace hears
