#include <gtest/gtest.h>

#include "hears/mdp.h"
#include "hears/types.h"

namespace hears {
namespace {

TabularMdp SingleState(double r, double gamma) {
  return TabularMdp(1, 1, {1.0}, {r}, gamma, {0});
}

// s0 --a0--> s1 (reward 1), s0 --a1--> s0 (reward 0); s1 terminal
TabularMdp TwoStateChain() {
  std::vector<double> p(2 * 2 * 2, 0.0), r(2 * 2 * 2, 0.0);
  auto idx = [](int s, int a, int n) { return (s * 2 + a) * 2 + n; };
  p[idx(0, 0, 1)] = 1.0;
  r[idx(0, 0, 1)] = 1.0;
  p[idx(0, 1, 0)] = 1.0;
  p[idx(1, 0, 1)] = 1.0;
  p[idx(1, 1, 1)] = 1.0;
  return TabularMdp(2, 2, p, r, 0.9, {0, 1});
}

TEST(ValueIteration, GeometricSeries) {
  const ValueTable vt = ValueIteration(SingleState(1.0, 0.5));
  EXPECT_NEAR(vt.v[0], 2.0, 1e-9);
}

TEST(ValueIteration, TwoStateChain) {
  const ValueTable vt = ValueIteration(TwoStateChain());
  EXPECT_NEAR(vt.v[0], 1.0, 1e-9);
  EXPECT_NEAR(vt.v[1], 0.0, 1e-12);
}

TEST(ValueIteration, ZeroRewardsGiveZeroValues) {
  const TabularMdp m = RandomMdp(3, 6, 3, 1.0);
  const TabularMdp z = m.WithReward(std::vector<double>(m.reward().size(), 0.0));
  EXPECT_EQ(ValueIteration(z).v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ValueIteration, ThrowsWithResidualWhenCapped) {
  try {
    ValueIteration(SingleState(1.0, 0.99), 1e-12, 3);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.residual(), 0.0);
    EXPECT_EQ(e.iterations(), 3);
  }
}

TEST(GreedyPolicy, PicksMaxAndBreaksTiesLow) {
  ValueTable vt;
  vt.q.resize(2, 2);
  vt.q << 0.0, 1.0, 1.0, 1.0;
  const Policy p = GreedyPolicy(vt);
  EXPECT_EQ(p[0], 1);
  EXPECT_EQ(p[1], 0);
}

TEST(GreedyPolicy, ChainAdvances) {
  EXPECT_EQ(GreedyPolicy(ValueIteration(TwoStateChain()))[0], 0);
}

TEST(EvaluatePolicy, MatchesValueIterationOnChain) {
  const TabularMdp m = TwoStateChain();
  const ValueTable vt = ValueIteration(m);
  const Eigen::VectorXd v = EvaluatePolicy(m, GreedyPolicy(vt));
  EXPECT_NEAR((v - vt.v).cwiseAbs().maxCoeff(), 0.0, 1e-9);
}

TEST(EvaluatePolicy, UniformRandomOnZeroRewardIsZero) {
  const TabularMdp m = RandomMdp(4, 5, 3, 1.0);
  const TabularMdp z = m.WithReward(std::vector<double>(m.reward().size(), 0.0));
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(5, 3, 1.0 / 3.0);
  EXPECT_NEAR(EvaluatePolicy(z, uniform).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(EvaluatePolicy, NegativeSelfLoop) {
  EXPECT_NEAR(EvaluatePolicy(SingleState(-1.0, 0.9), Policy{0})[0], -10.0, 1e-9);
}

TEST(RandomMdp, Deterministic) {
  const TabularMdp a = RandomMdp(99, 7, 3, 2.0);
  const TabularMdp b = RandomMdp(99, 7, 3, 2.0);
  EXPECT_EQ(a.transition(), b.transition());
  EXPECT_EQ(a.reward(), b.reward());
}

TEST(RandomMdp, RowsSumToOne) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMdp m = RandomMdp(seed, 9, 4, 1.0);
    for (int s = 0; s < m.n_states(); ++s) {
      for (int a = 0; a < m.n_actions(); ++a) {
        double sum = 0.0;
        for (int n = 0; n < m.n_states(); ++n) sum += m.P(s, a, n);
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  }
}

TEST(RandomMdp, SeedSevenSolves) {
  const TabularMdp m = RandomMdp(7, 5, 3, 1.0);
  const ValueTable vt = ValueIteration(m);
  EXPECT_LE(vt.residual, 1e-10);
  EXPECT_EQ(GreedyPolicy(vt).size(), 5u);
}

TEST(TabularMdp, RejectsBadRows) {
  EXPECT_THROW(TabularMdp(1, 1, {0.5}, {0.0}, 0.9, {0}), ModelError);
  EXPECT_THROW(TabularMdp(1, 1, {1.0}, {0.0}, 1.0, {0}), ModelError);
  EXPECT_THROW(TabularMdp(1, 1, {1.0}, {1.0}, 0.9, {1}), ModelError);
}

// property: the value-iteration fixed point satisfies the Bellman equation
// and the greedy policy's exact value equals it
TEST(MdpProperty, OptimalFixedPoint) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMdp m = RandomMdp(seed, 3 + seed % 9, 2 + seed % 3, 3.0, 0.95);
    const ValueTable vt = ValueIteration(m);
    EXPECT_LE(BellmanResidual(m, vt.v), 1e-9);
    const Eigen::VectorXd v = EvaluatePolicy(m, GreedyPolicy(vt));
    EXPECT_LE((v - vt.v).cwiseAbs().maxCoeff(), 1e-8);
  }
}

}  // namespace
}  // namespace hears
