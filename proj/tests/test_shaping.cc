#include <gtest/gtest.h>

#include <cmath>

#include "hears/mdp.h"
#include "hears/rng.h"
#include "hears/shaping.h"

namespace hears {
namespace {

Eigen::VectorXd Uniform(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.Uniform(lo, hi);
  return v;
}

TEST(ActionEnergy, Examples) {
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_EQ(ActionEnergy(zero, Eigen::MatrixXd::Identity(2, 2)), 0.0);
  const std::vector<double> a{1.0, 2.0}, na{-1.0, -2.0};
  EXPECT_DOUBLE_EQ(ActionEnergy(a, Eigen::MatrixXd::Identity(2, 2)), 5.0);
  EXPECT_DOUBLE_EQ(ActionEnergy(a, {}), 5.0);
  EXPECT_DOUBLE_EQ(ActionEnergy(a, Eigen::MatrixXd::Identity(2, 2)),
                   ActionEnergy(na, Eigen::MatrixXd::Identity(2, 2)));
}

TEST(ActionEnergy, RejectsShapeMismatch) {
  const std::vector<double> a{1.0, 2.0};
  EXPECT_THROW(ActionEnergy(a, Eigen::MatrixXd::Identity(3, 3)), ModelError);
}

TEST(ShapingConfig, ValidateRejectsNegativeLambdaAndIndefiniteQ) {
  ShapingConfig c;
  c.lambda = -0.1;
  EXPECT_THROW(c.Validate(), ModelError);
  c.lambda = 0.1;
  c.q_matrix = Eigen::MatrixXd::Identity(2, 2);
  c.q_matrix(1, 1) = -1.0;
  EXPECT_THROW(c.Validate(), ModelError);
}

TEST(ShapedReward, Examples) {
  EXPECT_EQ(ShapedReward(0.7, 0.0, 0.0, 3.0, 0.99, 0.0), 0.7);
  EXPECT_NEAR(ShapedReward(1.0, 2.0, 3.0, 4.0, 0.99, 0.01), 1.93, 1e-12);
  const double c = 2.5;
  EXPECT_NEAR(ShapedReward(1.0, c, c, 2.0, 0.9, 0.1), 1.0 + (0.9 - 1.0) * c - 0.2, 1e-12);
}

TEST(LambdaMax, OperatingPointAndHomogeneity) {
  const double l = LambdaMax(10.0, 0.99, 1.0, 100.0);
  EXPECT_NEAR(l, 10.0 / (2 * 0.99 * 100.0), 1e-15);
  EXPECT_GE(l, 0.050);
  EXPECT_LE(l, 0.051);
  EXPECT_NEAR(LambdaMax(10.0, 0.99, 2.0, 100.0), l / 2.0, 1e-15);
  EXPECT_LT(0.01, l);  // the implemented vehicle lambda sits below the ceiling
  EXPECT_THROW(LambdaMax(0.0, 0.99, 1.0, 100.0), ModelError);
}

TEST(RewardBound, Checks) {
  ShapingConfig c;
  c.r_max = 10.0;
  EXPECT_TRUE(ShapedRewardBoundCheck(c, std::vector<double>{}).ok());
  EXPECT_EQ(ShapedRewardBoundCheck(c, std::vector<double>{}).checked, 0u);
  EXPECT_TRUE(ShapedRewardBoundCheck(c, std::vector<double>{-30.0, 0.0, 29.9, 30.0}).ok());
  const auto r = ShapedRewardBoundCheck(c, std::vector<double>{1.0, -30.5, 2.0});
  ASSERT_EQ(r.flagged.size(), 1u);
  EXPECT_EQ(r.flagged[0], 1u);
  c.gamma = 0.99;
  c.phi_max = 1.0;
  c.lambda = 0.02;
  EXPECT_NEAR(AdditiveRewardBound(c, 5.0), 10.0 + 2 * 0.99 + 0.1, 1e-12);
}

TEST(Telescoping, DirectEqualsBoundary) {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> phi(2 + k);
    for (double& p : phi) p = rng.Uniform(-3, 3);
    EXPECT_NEAR(DiscountedShapingSum(phi, 0.97), TelescopedShapingSum(phi, 0.97), 1e-10);
  }
}

TEST(EmbedShapedMdp, IdentityCase) {
  const TabularMdp m = RandomMdp(11, 6, 3, 1.0);
  const TabularMdp e = EmbedShapedMdp(m, Eigen::VectorXd::Zero(6), 0.0, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(e.reward(), m.reward());
  EXPECT_EQ(e.transition(), m.transition());
}

TEST(EmbedShapedMdp, InvariantGreedyPolicies) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const TabularMdp m = RandomMdp(200 + i, 4 + i % 7, 2 + i % 3, 1.0);
    const Eigen::VectorXd phi = SanitizePotential(m, Uniform(rng, m.n_states(), -4, 4), 4.0);
    const Eigen::VectorXd energy = Uniform(rng, m.n_actions(), 0, 2);
    const Policy base = GreedyPolicy(ValueIteration(m));
    EXPECT_EQ(GreedyPolicy(ValueIteration(EmbedShapedMdp(m, phi, 0.0, energy))), base);
    const double lambda = rng.Uniform(0, 0.5);
    const Policy m_lambda =
        GreedyPolicy(ValueIteration(EmbedShapedMdp(m, Eigen::VectorXd::Zero(m.n_states()), lambda, energy)));
    EXPECT_EQ(GreedyPolicy(ValueIteration(EmbedShapedMdp(m, phi, lambda, energy))), m_lambda);
  }
}

TEST(SanitizePotential, ClipsAndZeroesTerminals) {
  std::vector<double> p(2 * 1 * 2, 0.0);
  p[0 * 2 + 1] = 1.0;  // s0 -> s1
  p[1 * 2 + 1] = 1.0;  // s1 self-loop
  const TabularMdp m(2, 1, p, std::vector<double>(4, 0.0), 0.9, {0, 1});
  Eigen::VectorXd phi(2);
  phi << 7.0, 3.0;
  const Eigen::VectorXd s = SanitizePotential(m, phi, 2.0);
  EXPECT_EQ(s[0], 2.0);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(ClipPotential(-5.0, 1.0), -1.0);
}

TEST(ScheduleWeights, Endpoints) {
  for (auto kind : {ScheduleKind::kLinear, ScheduleKind::kExponential}) {
    auto [t0, e0] = ScheduleWeights(0, kind, 100.0, 1.0, 50);
    EXPECT_NEAR(t0 / e0, 100.0, 1e-12);
    EXPECT_NEAR(t0 + e0, 1.0, 1e-12);
    auto [t1, e1] = ScheduleWeights(50, kind, 100.0, 1.0, 50);
    EXPECT_NEAR(t1 / e1, 1.0, 1e-12);
    auto [t2, e2] = ScheduleWeights(500, kind, 100.0, 1.0, 50);
    EXPECT_NEAR(t2 / e2, 1.0, 1e-12);
  }
  const auto c0 = ScheduleWeights(0, ScheduleKind::kConstant, 10.0, 1.0, 5);
  for (int ep : {1, 4, 5, 100}) EXPECT_EQ(ScheduleWeights(ep, ScheduleKind::kConstant, 10.0, 1.0, 5), c0);
}

TEST(ScheduleWeights, MonotoneRatio) {
  double prev = 1e300;
  for (int ep = 0; ep <= 60; ++ep) {
    auto [t, e] = ScheduleWeights(ep, ScheduleKind::kExponential, 100.0, 1.0, 50);
    EXPECT_LE(t / e, prev + 1e-12);
    prev = t / e;
  }
}

TEST(EnvelopeDerivative, ZeroEnergyAndSign) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const TabularMdp m = RandomMdp(300 + i, 6, 3, 1.0);
    const Eigen::VectorXd phi = Uniform(rng, 6, -1, 1);
    const EnvelopeCheck z = EnvelopeDerivativeCheck(m, phi, Eigen::VectorXd::Zero(3), 0.1);
    EXPECT_NEAR(z.finite_diff, 0.0, 1e-12);
    EXPECT_EQ(z.expected, 0.0);
    const EnvelopeCheck c = EnvelopeDerivativeCheck(m, phi, Uniform(rng, 3, 0, 1), rng.Uniform(0, 2));
    EXPECT_LE(c.finite_diff, 1e-12);
    if (c.policy_constant) {
      EXPECT_LE(std::abs(c.finite_diff - c.expected), 1e-6 * std::abs(c.expected) + 1e-9);
    }
  }
}

TEST(ApproxPotential, BoundValueAndZeroGap) {
  EXPECT_NEAR(ApproxPotentialBound(0.2, 0.99, 0.01), 0.495, 1e-3);
  const TabularMdp m = RandomMdp(8, 6, 3, 1.0);
  Rng rng(8);
  const Eigen::VectorXd phi = Uniform(rng, 6, -1, 1);
  EXPECT_EQ(ApproxPotentialGapCheck(m, phi, 0.5, 0.0, 5, 1).worst_relative_gap, 0.0);
  const ApproxGapReport r = ApproxPotentialGapCheck(m, phi, 0.5, 0.3, 10, 2);
  EXPECT_EQ(r.worst_relative_gap, 0.0);
  EXPECT_NE(r.note.find("5%"), std::string::npos);
}

TEST(PotentialSpec, ComposesAndSchedules) {
  PotentialSpec p;
  p.alpha_task = 2.0;
  p.alpha_energy = 0.5;
  p.phi_task = [](const EnvState& s) { return s.q[0]; };
  p.phi_energy = [](const EnvState&) { return -4.0; };
  EnvState s;
  s.q = {3.0};
  EXPECT_DOUBLE_EQ(p(s), 6.0 - 2.0);
  p.schedule = ScheduleSpec{ScheduleKind::kLinear, 3.0, 1.0, 10, 4.0};
  p.SetEpisode(0);
  EXPECT_DOUBLE_EQ(p.alpha_task, 3.0);
  EXPECT_DOUBLE_EQ(p.alpha_energy, 1.0);
  p.phi_task = [](const EnvState&) { return std::nan(""); };
  EXPECT_THROW(p(s), ModelError);
}

}  // namespace
}  // namespace hears
