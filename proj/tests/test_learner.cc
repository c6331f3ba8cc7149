#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "hears/envs/gridnav.h"
#include "hears/envs/hopper.h"
#include "hears/envs/pendulum.h"
#include "hears/harness/experiment.h"
#include "hears/learner/actor_critic.h"
#include "hears/learner/probe.h"
#include "hears/learner/tabular.h"
#include "hears/nn.h"
#include "hears/shaping.h"

namespace hears {
namespace {

TEST(Mlp, ZeroParamsGiveZeroOutput) {
  Mlp net({3, 5, 2});
  std::fill(net.params().begin(), net.params().end(), 0.0);
  EXPECT_EQ(net.Forward(Eigen::Vector3d(1, -2, 3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, LinearLayerGradientIsOuterProduct) {
  Mlp net({3, 2});
  Rng rng(1);
  net.InitRandom(rng);
  const Eigen::Vector3d x(0.5, -1.0, 2.0);
  const Eigen::Vector2d g(0.3, -0.7);
  Mlp::Cache cache;
  net.Forward(x, &cache);
  std::vector<double> grad(net.n_params(), 0.0);
  net.Backward(cache, g, grad);
  // weights row-major then bias
  for (int o = 0; o < 2; ++o) {
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(grad[o * 3 + i], g[o] * x[i]);
    EXPECT_DOUBLE_EQ(grad[6 + o], g[o]);
  }
}

TEST(Mlp, FiniteDifferenceGradient) {
  Mlp net({2, 16, 1}, Activation::kTanh, Activation::kIdentity);
  Rng rng(2);
  net.InitRandom(rng);
  for (double& p : net.params()) p += rng.Uniform(-0.2, 0.2);
  const Eigen::Vector2d x(0.4, -0.9);
  Mlp::Cache cache;
  net.Forward(x, &cache);
  std::vector<double> grad(net.n_params(), 0.0);
  net.Backward(cache, Eigen::VectorXd::Ones(1), grad);
  const double h = 1e-5;
  double worst = 0.0;
  for (size_t i = 0; i < net.n_params(); ++i) {
    const double keep = net.params()[i];
    net.params()[i] = keep + h;
    const double up = net.Forward(x)[0];
    net.params()[i] = keep - h;
    const double down = net.Forward(x)[0];
    net.params()[i] = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-5}));
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Mlp, ClipAndPolyak) {
  std::vector<double> g{3.0, 4.0};
  EXPECT_DOUBLE_EQ(ClipGradNorm(g, 1.0), 5.0);
  EXPECT_NEAR(std::hypot(g[0], g[1]), 1.0, 1e-15);
  std::vector<double> t{0.0, 10.0};
  PolyakUpdate({1.0, 0.0}, t, 0.1);
  EXPECT_DOUBLE_EQ(t[0], 0.1);
  EXPECT_DOUBLE_EQ(t[1], 9.0);
}

TEST(CriticGradient, TenParameterCritic) {
  AcConfig c;
  c.hidden = {2};  // 3 -> 2 -> 1: 6 + 2 + 2 + 1 = 11 parameters
  ActorCritic ag(3, 1, c, 4);
  Rng rng(4);
  std::vector<ReplayEntry> entries(8);
  std::vector<const ReplayEntry*> batch;
  for (auto& e : entries) {
    e.obs = Eigen::Vector3d(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    e.next_obs = Eigen::Vector3d(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    e.tr.reward = rng.Uniform(-1, 1);
    e.gamma = 0.99;
    batch.push_back(&e);
  }
  std::vector<double> grad;
  ag.CriticLoss(batch, &grad);
  ASSERT_EQ(grad.size(), ag.critic().n_params());
  const double h = 1e-6;
  for (size_t i = 0; i < grad.size(); ++i) {
    auto& p = ag.mutable_critic().params();
    const double keep = p[i];
    p[i] = keep + h;
    const double up = ag.CriticLoss(batch);
    p[i] = keep - h;
    const double down = ag.CriticLoss(batch);
    p[i] = keep;
    const double fd = (up - down) / (2 * h);
    EXPECT_LE(std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-5}), 1e-4);
  }
}

TEST(TabularQ, ZeroShapingMatchesVanillaBitwise) {
  const GridNav grid(GridNavOptions{.size = 6, .max_steps = 200});
  GridNavTabular env(grid);
  QLearningConfig q;
  q.episodes = 60;
  TabularShaping zero = GridNavShaping(grid, ShapingSetup{});
  const auto a = TabularQLearning(env, zero, q, 17);
  const auto b = TabularQLearning(env, GridNavShaping(grid, ShapingSetup::Vanilla()), q, 17);
  EXPECT_TRUE((a.q.array() == b.q.array()).all());
  EXPECT_EQ(a.record.BaseReturns(), b.record.BaseReturns());
}

TEST(TabularQ, ConvergesToOptimalPolicyOfShapedMdp) {
  const GridNav grid(GridNavOptions{.size = 5, .gamma = 0.9, .max_steps = 200});
  GridNavTabular env(grid);
  ShapingSetup sh;
  sh.alpha_task = 0.5;
  sh.lambda = 0.01;
  const TabularShaping ts = GridNavShaping(grid, sh);
  QLearningConfig q;
  q.episodes = 3000;
  q.epsilon_end = 0.2;
  q.alpha0 = 0.5;
  const auto res = TabularQLearning(env, ts, q, 5);
  const TabularMdp embedded = EmbedShapedMdp(grid.mdp(), ts.potential, ts.lambda, ts.action_energy);
  const ValueTable vt = ValueIteration(embedded);
  // the learned greedy policy attains the optimal shaped value everywhere
  const Eigen::VectorXd v = EvaluatePolicy(embedded, res.greedy);
  EXPECT_LE((v - vt.v).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TabularQ, RejectsDivergence) {
  const TabularMdp m = RandomMdp(1, 3, 2, 1.0, 0.9);
  MdpSampler env(m, 0, 10);
  TabularShaping s;
  s.enabled = true;
  s.potential = Eigen::Vector3d(1e9, -1e9, 1e9);
  s.action_energy = Eigen::Vector2d::Ones();
  QLearningConfig q;
  q.episodes = 50;
  EXPECT_THROW(TabularQLearning(env, s, q, 1), SimulationError);
}

TEST(ActorCritic, DeterministicPerSeed) {
  AcConfig c;
  c.episodes = 3;
  c.max_steps = 80;
  c.warmup_steps = 64;
  ShapingSetup s{true, 0.5, 0.01, 0.01, std::nullopt};
  Pendulum e1, e2;
  const auto a = ActorCriticTrain(e1, s, c, 9);
  const auto b = ActorCriticTrain(e2, s, c, 9);
  EXPECT_EQ(a.agent.actor().params(), b.agent.actor().params());
  EXPECT_EQ(a.record.BaseReturns(), b.record.BaseReturns());
  EXPECT_GT(a.agent.updates(), 0);
  const auto d = ActorCriticTrain(e1, s, c, 10);
  EXPECT_NE(a.agent.actor().params(), d.agent.actor().params());
}

TEST(ActorCritic, ShapedReturnDiffersFromBase) {
  AcConfig c;
  c.episodes = 2;
  c.max_steps = 50;
  Pendulum env;
  const auto r = ActorCriticTrain(env, ShapingSetup{true, 1.0, 0.1, 0.05, std::nullopt}, c, 3);
  ASSERT_EQ(r.record.episodes.size(), 2u);
  EXPECT_NE(r.record.episodes[0].base_return, r.record.episodes[0].shaped_return);
}

TEST(Replay, RecomputeMatchesStoredReward) {
  ReplayEntry e;
  e.shaped = true;
  e.tr.base_reward = 0.3;
  e.tr.phi = 1.2;
  e.tr.phi_next = 0.7;
  e.tr.action_energy = 2.0;
  e.gamma = 0.99;
  e.lambda = 0.05;
  e.tr.reward = ShapedReward(0.3, 1.2, 0.7, 2.0, 0.99, 0.05);
  EXPECT_DOUBLE_EQ(ReplayBuffer::Recompute(e), e.tr.reward);
  ReplayBuffer buf(3, 1);
  for (int i = 0; i < 5; ++i) {
    ReplayEntry x = e;
    x.tr.base_reward = i;
    buf.Push(x);
  }
  EXPECT_EQ(buf.size(), 3u);
  for (size_t i : buf.SampleIndices(100)) EXPECT_LT(i, 3u);
}

TEST(Checkpoint, RoundTrip) {
  AcConfig c;
  ActorCritic a(3, 1, c, 1), b(3, 1, c, 2);
  const std::string path = (std::filesystem::temp_directory_path() / "hears_ckpt_test").string();
  SaveCheckpoint(path, a, 1, "abc");
  LoadCheckpoint(path, b);
  EXPECT_EQ(a.actor().params(), b.actor().params());
  EXPECT_EQ(a.critic().params(), b.critic().params());
  ActorCritic wrong(4, 1, c, 1);
  EXPECT_THROW(LoadCheckpoint(path, wrong), ModelError);
}

TEST(Probe, ConstantPolicyHasZeroVariation) {
  Pendulum env;
  Rng rng(0);
  const ProbeResult r = OscillationProbe(env, ConstantPolicy({0.3}), env.Reset(rng), 100);
  EXPECT_EQ(r.action_total_variation, 0.0);
  EXPECT_EQ(r.steps, 100);
}

TEST(Probe, AlternatingHopperPolicy) {
  HopperLite env;
  const ProbeResult r = OscillationProbe(env, AlternatingPolicy(3, 1.0), env.Standing(), 200);
  ASSERT_GT(r.steps, 1);
  // |a_t - a_{t-1}| = 2 per component per step
  EXPECT_NEAR(r.action_total_variation, 2.0 * std::sqrt(3.0) * (r.steps - 1), 1e-9);
  EXPECT_GE(r.action_total_variation, 100.0 * r.net_energy_change);
}

}  // namespace
}  // namespace hears
