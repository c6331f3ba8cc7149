#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hears/energy.h"
#include "hears/envs/lander.h"
#include "hears/envs/pendulum.h"
#include "hears/envs/vehicle.h"
#include "hears/rng.h"
#include "hears/shaping.h"

namespace hears {
namespace {

EnvState Pend(double theta, double omega) {
  EnvState s;
  s.q = {theta};
  s.q_dot = {omega};
  return s;
}

TEST(TotalEnergy, Pendulum) {
  const EnergyModel m = PendulumEnergyModel({});
  EXPECT_EQ(TotalEnergy(m, Pend(0.0, 0.0)), 0.0);
  EXPECT_NEAR(TotalEnergy(m, Pend(std::numbers::pi, 0.0)), 19.62, 1e-12);
  EXPECT_NEAR(TotalEnergy(m, Pend(0.0, 2.0)), 2.0, 1e-12);
  EXPECT_THROW(TotalEnergy(m, Pend(std::nan(""), 0.0)), ModelError);
}

TEST(TotalEnergy, LanderAtRestOnPadIsZero) {
  const EnergyModel m = LanderEnergyModel({});
  const Lander2D env;
  EnvState s;
  s.q = {0.0, env.RestHeight(), 0.0};
  s.q_dot = {0.0, 0.0, 0.0};
  s.aux = {0.0, 0.0, 0.0};
  EXPECT_NEAR(TotalEnergy(m, s), 0.0, 1e-12);
  EXPECT_NEAR(EnergyPotential(m, s), 0.0, 1e-12);
  // rest is the minimum of the potential energy
  for (double dy : {-0.02, -0.005, 0.005, 0.02, 0.5}) {
    EnvState t = s;
    t.q[1] += dy;
    EXPECT_GT(TotalEnergy(m, t), 0.0);
  }
}

TEST(EnergyPotential, NegatedNormalizedEnergy) {
  const EnergyModel m = PendulumEnergyModel({});
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const EnvState s = Pend(rng.Uniform(-3, 3), rng.Uniform(-2, 2));
    const double raw = -TotalEnergy(m, s) / m.normalizer();
    EXPECT_DOUBLE_EQ(EnergyPotential(m, s), ClipPotential(raw, m.phi_max()));
  }
}

TEST(VehicleEnergy, Examples) {
  VehicleEnergyParams p;
  const VehicleEnergyTerms e = VehicleInternalEnergyTerms(p.v_target, 0.0, 0.0, 0.0, p);
  EXPECT_DOUBLE_EQ(e.lin, 1.0);
  EXPECT_EQ(e.ang, 0.0);
  EXPECT_EQ(e.slip, 0.0);
  EXPECT_EQ(e.yaw_change, 0.0);
  EXPECT_EQ(e.speed_dev, 0.0);
  EXPECT_DOUBLE_EQ(e.total(), 1.0);

  // slip is quadratic in beta with weight 2
  const double b1 = 0.05, b2 = 0.10;
  const double s1 = VehicleInternalEnergyTerms(10 * std::cos(b1), 10 * std::sin(b1), 0, 0, p).slip;
  const double s2 = VehicleInternalEnergyTerms(10 * std::cos(b2), 10 * std::sin(b2), 0, 0, p).slip;
  EXPECT_NEAR(s1, 2.0 * b1 * b1, 1e-12);
  EXPECT_NEAR(s2 / s1, 4.0, 1e-9);
  EXPECT_EQ(VehicleInternalEnergyTerms(12, 1, 0.3, 0.3, p).yaw_change, 0.0);
}

TEST(EnergyModel, GradientsMatchFiniteDifferences) {
  const EnergyModel m = PendulumEnergyModel({});
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const EnvState s = Pend(rng.Uniform(-3, 3), rng.Uniform(-2, 2));
    EXPECT_NEAR(m.PotentialGradient(s)[0], NumericPotentialGradient(m, s)[0], 1e-6);
  }
}

TEST(LyapunovHeuristic, ConstantTrace) {
  EnergyTrace t;
  for (int i = 0; i < 10; ++i) t.Push(3.0);
  t.energy_rate_dt.assign(9, 0.0);
  t.lyapunov.assign(10, 1.0);
  const LyapunovReport r = LyapunovHeuristicCheck(t, 0.01);
  EXPECT_EQ(r.discretization_residual, 0.0);
  EXPECT_FALSE(r.lyapunov_decrease_fraction.has_value());
}

TEST(LyapunovHeuristic, DeltaPhiIsNegatedDeltaE) {
  EnergyTrace t;
  for (double e : {1.0, 0.5, 0.7, 0.2}) t.Push(e);
  const auto de = t.DeltaE();
  const auto dp = t.DeltaPhi();
  ASSERT_EQ(de.size(), 3u);
  for (size_t i = 0; i < de.size(); ++i) EXPECT_EQ(dp[i], -de[i]);
}

TEST(LyapunovHeuristic, FrictionlessPendulumConservesEnergy) {
  PendulumOptions o;
  o.damping = 0.0;
  o.dt = 0.01;
  o.max_steps = 1 << 30;
  Pendulum env(o);
  EnvState s = Pend(2.5, 0.0);
  const double e0 = TotalEnergy(env.energy(), s);
  const double zero[1] = {0.0};
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const EnvState n = env.Step(s, zero).next;
    worst = std::max(worst, std::abs(TotalEnergy(env.energy(), n) - TotalEnergy(env.energy(), s)));
    s = n;
  }
  EXPECT_LE(worst, 1e-4 * e0);
}

TEST(ApproximateModel, IdentityAndNoiseBound) {
  const EnergyModel m = VehicleEnergyModel({});
  Rng rng(6);
  std::vector<EnvState> samples;
  for (int i = 0; i < 200; ++i) {
    EnvState s;
    s.q = {0, 0, 0};
    s.q_dot = {rng.Uniform(0, 20), rng.Uniform(-1, 1), rng.Uniform(-0.5, 0.5)};
    s.aux.assign(7, 0.0);
    s.aux[2] = rng.Uniform(-0.5, 0.5);
    samples.push_back(s);
  }
  const ApproximateEnergy same = ApproximateModel(m, {}, 0.0, 1, samples);
  EXPECT_EQ(same.epsilon_abs, 0.0);
  for (const auto& s : samples) EXPECT_EQ(TotalEnergy(same.model, s), TotalEnergy(m, s));

  const ApproximateEnergy noisy = ApproximateModel(m, {}, 0.05, 9, samples);
  EXPECT_LE(noisy.epsilon_abs, 0.05 + 1e-12);
  EXPECT_GT(noisy.epsilon_abs, 0.0);

  const ApproximateEnergy kinetic = ApproximateModel(m, {"E_slip", "E_dr", "E_dv"}, 0.0, 1, samples);
  EXPECT_GT(kinetic.epsilon_abs, 0.0);
  EXPECT_TRUE(std::isfinite(kinetic.epsilon_rel));
  EXPECT_THROW(ApproximateModel(m, {"nope"}, 0.0, 1, samples), ModelError);
}

}  // namespace
}  // namespace hears
