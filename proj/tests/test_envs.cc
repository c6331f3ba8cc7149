#include <gtest/gtest.h>

#include <cmath>

#include "hears/envs/gridnav.h"
#include "hears/envs/hopper.h"
#include "hears/envs/lander.h"
#include "hears/envs/pendulum.h"
#include "hears/envs/registry.h"
#include "hears/envs/road.h"
#include "hears/envs/vehicle.h"
#include "hears/rng.h"
#include "hears/vehicle_model.h"

namespace hears {
namespace {

TEST(Pendulum, RestAtBottomIsEquilibrium) {
  Pendulum env;
  EnvState s;
  s.q = {0.0};
  s.q_dot = {0.0};
  const double zero[1] = {0.0};
  const StepResult r = env.Step(s, zero);
  EXPECT_EQ(r.next.q, s.q);
  EXPECT_EQ(r.next.q_dot, s.q_dot);
  EXPECT_EQ(r.next.t, 1);
}

TEST(Pendulum, ClipsAndFlagsActions) {
  Pendulum env;
  EnvState s;
  s.q = {0.3};
  s.q_dot = {0.0};
  const double big[1] = {5.0}, one[1] = {1.0};
  const StepResult a = env.Step(s, big);
  const StepResult b = env.Step(s, one);
  EXPECT_TRUE(a.clipped);
  EXPECT_FALSE(b.clipped);
  EXPECT_EQ(a.next, b.next);
  std::vector<double> v{2.0, -3.0, 0.5};
  EXPECT_TRUE(ClipAction(v));
  EXPECT_FALSE(ClipAction(v));  // idempotent
  EXPECT_EQ(v, (std::vector<double>{1.0, -1.0, 0.5}));
}

TEST(Pendulum, RejectsNonFiniteState) {
  Pendulum env;
  EnvState s;
  s.q = {std::nan("")};
  s.q_dot = {0.0};
  const double zero[1] = {0.0};
  EXPECT_THROW(env.Step(s, zero), SimulationError);
}

TEST(GridNav, MoveIntoGoal) {
  GridNav g;
  Rng rng(0);
  const int before = g.Index(19, 18);
  bool hit = false;
  for (int a = 0; a < g.n_actions(); ++a) {
    if (g.Move(before, a) == g.goal()) {
      const auto o = g.Step(before, a, rng);
      EXPECT_EQ(o.next, g.goal());
      EXPECT_EQ(o.reward, 1.0);
      EXPECT_TRUE(o.terminal);
      hit = true;
    }
  }
  EXPECT_TRUE(hit);
  EXPECT_EQ(g.TaskPotential(g.goal()), 0.0);
  EXPECT_EQ(g.TaskPotential(g.start()), -38.0);
}

TEST(GridNav, WallsAndDistances) {
  GridNavOptions o;
  o.size = 5;
  o.walls = {{1, 0}, {1, 1}, {1, 2}, {1, 3}};
  GridNav g(o);
  EXPECT_TRUE(g.wall(g.Index(1, 0)));
  EXPECT_EQ(g.Distance(g.start()), 8);  // along row 0, then down column 4
  const auto& m = g.mdp();
  EXPECT_TRUE(m.terminal(g.goal()));
}

TEST(Lander, PadCentrePotentialIsZeroMaximum) {
  Lander2D env;
  EnvState s;
  s.q = {0.0, 0.0, 0.0};
  s.q_dot = {0.0, 0.0, 0.0};
  s.aux = {0.0, 0.0, 0.0};
  EXPECT_EQ(env.TaskPotential(s), 0.0);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) EXPECT_LT(env.TaskPotential(env.Reset(rng)), 0.0);
}

TEST(Lander, FreeFallCrashes) {
  Lander2D env;
  Rng rng(1);
  EnvState s = env.Reset(rng);
  const double off[2] = {-1.0, 0.0};
  bool terminal = false;
  double ret = 0.0;
  for (int t = 0; t < env.max_steps() && !terminal; ++t) {
    const StepResult r = env.Step(s, off);
    ret += r.reward;
    terminal = r.terminal;
    s = r.next;
  }
  EXPECT_TRUE(terminal);
  EXPECT_LT(ret, -5.0);
}

TEST(Hopper, TaskPotential) {
  HopperLite env;
  EnvState s = env.Standing();
  EXPECT_EQ(env.TaskPotential(s), 0.0);
  s.q[1] = 4.0;
  EXPECT_DOUBLE_EQ(0.5 * env.TaskPotential(s), 1.0);
}

TEST(Hopper, StandingIsNearlyStill) {
  HopperLite env;
  EnvState s = env.Standing();
  const double zero[3] = {0.0, 0.0, 0.0};
  for (int t = 0; t < 50; ++t) s = env.Step(s, zero).next;
  EXPECT_NEAR(s.q[0], env.RestHeight(), 1e-6);
}

TEST(Vehicle, RewardExamples) {
  VehicleRewardInputs in;
  in.feasibility = 0.85;
  in.y_ref = Eigen::Vector2d(0.01, 0.1);
  in.y_exec = in.y_ref;
  in.v_x = in.v_target;
  const VehicleRewardTerms t = VehicleBaseReward(in);
  EXPECT_DOUBLE_EQ(CooperationSigmoid(0.85), 0.5);
  EXPECT_NEAR(t.coop - t.ref_exec, 1.25, 1e-12);
  EXPECT_DOUBLE_EQ(t.path, 5.0);
  EXPECT_DOUBLE_EQ(t.speed, 1.0);
  VehicleRewardInputs missing;
  EXPECT_THROW(VehicleBaseReward(missing), ModelError);
}

TEST(Vehicle, TaskPotentialAtTarget) {
  VehicleTaskInputs in;
  in.v_x = in.v_target;
  in.progress = in.progress_max = 300.0;
  EXPECT_NEAR(VehicleTaskPotential(in), 6.8, 1e-12);
}

TEST(Vehicle, ForceFreeLateralDynamics) {
  VehicleOptions o;
  o.params.cf = 1e-12;
  o.params.cr = 1e-12;
  BicycleVehicle env(o);
  RoadProfile flat;
  flat.length = 1000.0;
  flat.knots = {0.0, 1000.0};
  flat.mu = {1.0};
  flat.curvature = {0.0, 0.0};
  flat.lateral_slope = {0.0, 0.0};
  flat.longitudinal_slope = {0.0, 0.0};
  env.SetRoad(flat);
  Eigen::Matrix<double, 6, 1> x;
  x << 10.0, 0.0, 0.0, 12.0, 0.3, 0.2;
  const auto d = env.Derivative(x, VehicleInputs{});
  EXPECT_NEAR(d[4], -12.0 * 0.2, 1e-6);
  EXPECT_NEAR(d[5], 0.0, 1e-6);
}

TEST(Vehicle, InputsStayInBounds) {
  BicycleVehicle env(VehicleOptions{.road_length = kTestRoadLength, .road_seed = 7});
  Rng rng(5);
  EnvState s = env.Reset(rng);
  for (int t = 0; t < 400; ++t) {
    std::vector<double> a{rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(0, 1)};
    const StepResult r = env.Step(s, a);
    const VehicleStepInfo& info = env.last_info();
    EXPECT_TRUE(info.inputs_within_bounds);
    EXPECT_LE(std::abs(info.steer), env.options().steer_max + 1e-12);
    EXPECT_LE(std::abs(info.yaw_moment), env.options().yaw_moment_max + 1e-9);
    EXPECT_GE(info.feasibility, 0.0);
    EXPECT_LE(info.feasibility, 1.0);
    s = r.next;
    if (r.terminal || r.truncated) break;
  }
}

TEST(Vehicle, CruiseFeedbackUnderResidual) {
  BicycleVehicle env;
  const double vt = env.options().v_target;
  EXPECT_EQ(env.Acceleration(vt, 0.0), 0.0);
  EXPECT_EQ(env.Acceleration(0.0, 0.0), env.options().accel_max);  // saturates
  EXPECT_NEAR(env.Acceleration(vt - 1.0, 0.0), env.options().speed_gain, 1e-12);
  EXPECT_EQ(env.Acceleration(vt, -1.0), -env.options().accel_max);
}

// zero residuals leave the nominal path and speed feedback in charge
TEST(Vehicle, ZeroResidualCompletesTestRoad) {
  auto env = MakeEnv("vehicle-test");
  auto& veh = dynamic_cast<BicycleVehicle&>(*env);
  Rng rng(0);
  EnvState s = env->Reset(rng);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  double worst_ey = 0.0;
  bool finished = false;
  for (int t = 0; t < env->max_steps(); ++t) {
    const StepResult r = env->Step(s, zero);
    s = r.next;
    worst_ey = std::max(worst_ey, std::abs(s.q[1]));
    if (r.terminal) {
      finished = s.q[0] >= veh.road().length;
      break;
    }
  }
  EXPECT_TRUE(finished);
  EXPECT_LT(worst_ey, 0.5);
}

TEST(Road, DeterministicAndBounded) {
  const RoadProfile a = GenerateRoad(42, kTestRoadLength);
  const RoadProfile b = GenerateRoad(42, kTestRoadLength);
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_DOUBLE_EQ(a.length, 300.0);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const RoadProfile r = GenerateRoad(seed, kTrainRoadLength);
    for (double mu : r.mu) {
      EXPECT_GE(mu, 0.1);
      EXPECT_LE(mu, 1.0);
    }
    EXPECT_NO_THROW(r.Validate());
  }
  const RoadProfile c = RoadProfile::FromJson(a.ToJson());
  EXPECT_EQ(c.ToJson(), a.ToJson());
}

TEST(Road, VehicleDefaults) {
  VehicleOptions o;
  EXPECT_EQ(o.v_target, 15.0);
  Rng rng(0);
  auto env = MakeEnv("vehicle-test");
  const EnvState s = env->Reset(rng);
  EXPECT_EQ(s.q_dot[0], 0.0);
  EXPECT_DOUBLE_EQ(dynamic_cast<BicycleVehicle&>(*env).road().length, 300.0);
}

TEST(Tire, SymmetricAndSaturating) {
  const double fz = 10000.0, c = 90000.0;
  EXPECT_EQ(TireLateralForce(0.0, fz, 0.8, c), 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = -1.5 + 3.0 * i / 999.0;
    const double f = TireLateralForce(alpha, fz, 0.8, c);
    EXPECT_DOUBLE_EQ(TireLateralForce(-alpha, fz, 0.8, c), -f);
    EXPECT_LE(std::abs(f), 0.8 * fz + 1e-9);
  }
}

TEST(Registry, KnownAndUnknownNames) {
  for (const auto& n : EnvNames()) EXPECT_NE(MakeEnv(n), nullptr);
  EXPECT_THROW(MakeEnv("moon"), ModelError);
}

// property: every env is deterministic given the same state and action
TEST(EnvProperty, StepDeterminism) {
  for (const auto& n : EnvNames()) {
    auto e1 = MakeEnv(n);
    auto e2 = MakeEnv(n);
    Rng r1(9), r2(9);
    EnvState s1 = e1->Reset(r1), s2 = e2->Reset(r2);
    ASSERT_EQ(s1, s2);
    Rng ar(4);
    for (int t = 0; t < 30; ++t) {
      std::vector<double> a(e1->action_dim());
      for (double& v : a) v = ar.Uniform(-1, 1);
      const StepResult a1 = e1->Step(s1, a);
      const StepResult a2 = e2->Step(s2, a);
      ASSERT_EQ(a1.next, a2.next) << n;
      ASSERT_EQ(a1.reward, a2.reward) << n;
      if (a1.terminal) break;
      s1 = a1.next;
      s2 = a2.next;
    }
  }
}

}  // namespace
}  // namespace hears
