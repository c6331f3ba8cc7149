#include <gtest/gtest.h>

#include <cmath>

#include "hears/mpc.h"
#include "hears/types.h"
#include "hears/vehicle_model.h"

namespace hears {
namespace {

MpcProblem Scalar(double a, double b, double q, double r) {
  MpcProblem p;
  p.model.a = Eigen::MatrixXd::Constant(1, 1, a);
  p.model.b = Eigen::MatrixXd::Constant(1, 1, b);
  p.model.c = Eigen::MatrixXd::Identity(1, 1);
  p.model.dt = 0.1;
  p.n_predict = 1;
  p.n_control = 1;
  p.q = Eigen::MatrixXd::Constant(1, 1, q);
  p.r = Eigen::MatrixXd::Constant(1, 1, r);
  // bounds far from the optimum so the problem is effectively unconstrained
  p.u_min = Eigen::VectorXd::Constant(1, -100.0);
  p.u_max = Eigen::VectorXd::Constant(1, 100.0);
  p.du_max = Eigen::VectorXd::Constant(1, 1000.0);
  p.max_iters = 100000;
  p.tol = 1e-13;
  return p;
}

MpcProblem Lateral() {
  MpcProblem p;
  p.model = LinearizeVehicle(VehicleParams{}, OperatingPoint{});
  p.n_predict = 10;
  p.n_control = 5;
  p.q = Eigen::Vector2d(2500.0, 400.0).asDiagonal();
  p.r = Eigen::Vector2d(1000.0, 1e-7).asDiagonal();
  p.u_min = Eigen::Vector2d(-0.5, -4000.0);
  p.u_max = Eigen::Vector2d(0.5, 4000.0);
  p.du_max = Eigen::Vector2d(0.01, 400.0);
  p.y_abs_max = Eigen::Vector2d(0.1, 1.0);
  p.y_track_tol = Eigen::Vector2d(0.02, 0.05);
  return p;
}

TEST(Mpc, AlreadyTracking) {
  const MpcProblem p = Lateral();
  const MpcReport r =
      SolveMpc(p, Eigen::Vector2d::Zero(), Eigen::MatrixXd::Zero(10, 2), Eigen::Vector2d::Zero());
  EXPECT_LE(r.u_sequence.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(r.feasibility_ratio, 1.0);
  EXPECT_TRUE(r.converged);
}

TEST(Mpc, ScalarClosedForm) {
  const double a = 0.9, b = 0.5, q = 2.0, r = 0.3, x0 = 1.0, y = 3.0;
  const MpcProblem p = Scalar(a, b, q, r);
  const MpcReport rep = SolveMpc(p, Eigen::VectorXd::Constant(1, x0),
                                 Eigen::MatrixXd::Constant(1, 1, y), Eigen::VectorXd::Zero(1));
  const double u = q * b * (y - a * x0) / (q * b * b + r);
  EXPECT_NEAR(rep.u0[0], u, 1e-8);
  EXPECT_TRUE(rep.converged);
}

TEST(Mpc, UnreachableReferenceHasZeroFeasibility) {
  MpcProblem p = Lateral();
  p.u_min = Eigen::Vector2d(-1e-3, -1.0);
  p.u_max = Eigen::Vector2d(1e-3, 1.0);
  Eigen::MatrixXd ref(10, 2);
  ref.col(0).setConstant(0.08);
  ref.col(1).setConstant(0.8);
  const MpcReport r = SolveMpc(p, Eigen::Vector2d::Zero(), ref, Eigen::Vector2d::Zero());
  EXPECT_EQ(r.feasibility_ratio, 0.0);
}

// property: returned inputs always respect box and rate limits, and the
// cost never exceeds that of holding the previous input
TEST(MpcProperty, FeasibleInputsAndDescent) {
  const MpcProblem p = Lateral();
  for (int k = 0; k < 30; ++k) {
    const double s = 0.01 * (k - 15);
    Eigen::MatrixXd ref(10, 2);
    ref.col(0).setConstant(s);
    ref.col(1).setConstant(10 * s);
    const Eigen::Vector2d x0(0.3 * s, -s);
    const Eigen::Vector2d u_prev(0.1 * s, 100 * s);
    const MpcReport r = SolveMpc(p, x0, ref, u_prev);
    EXPECT_TRUE(InputsFeasible(p, u_prev, r.u_sequence));
    const Eigen::MatrixXd hold = u_prev.transpose().replicate(p.n_control, 1);
    EXPECT_LE(r.cost, MpcCost(p, x0, ref, u_prev, hold) + 1e-9);
    for (size_t i = 1; i < r.cost_history.size(); ++i) {
      EXPECT_LE(r.cost_history[i], r.cost_history[i - 1] + 1e-9);
    }
  }
}

TEST(Mpc, CondensedPredictionMatchesSimulation) {
  const MpcProblem p = Lateral();
  const Condensed cd = Condense(p);
  Eigen::MatrixXd u(5, 2);
  u << 0.01, 10, 0.02, -5, -0.01, 0, 0.0, 30, 0.005, 1;
  const Eigen::Vector2d x0(0.2, -0.1);
  Eigen::VectorXd us(10);
  for (int k = 0; k < 5; ++k) us.segment(2 * k, 2) = u.row(k).transpose();
  const Eigen::VectorXd y = cd.f * x0 + cd.g * us;
  const Eigen::MatrixXd pred = PredictOutputs(p, x0, u);
  Eigen::VectorXd x = x0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd uk = u.row(std::min(k, 4)).transpose();
    x = p.model.a * x + p.model.b * uk;
    const Eigen::VectorXd yk = p.model.c * x;
    EXPECT_NEAR((yk - pred.row(k).transpose()).norm(), 0.0, 1e-12);
    EXPECT_NEAR((yk - y.segment(2 * k, 2)).norm(), 0.0, 1e-12);
  }
}

TEST(Mpc, ValidateRejectsBadShapes) {
  MpcProblem p = Lateral();
  p.q = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(p.Validate(), ModelError);
}

TEST(VehicleModel, ZeroStiffnessLimit) {
  VehicleParams p;
  OperatingPoint op;
  op.v_x = 12.0;
  op.cf = 1e-12;
  op.cr = 1e-12;
  Eigen::MatrixXd a, b, c;
  VehicleContinuousModel(p, op, &a, &b, &c);
  EXPECT_NEAR(a(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(a(0, 1), -12.0, 1e-12);
  EXPECT_NEAR(a(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(a(1, 1), 0.0, 1e-12);
  EXPECT_NEAR(b(1, 1), 1.0 / p.yaw_inertia, 1e-15);
}

TEST(VehicleModel, SmallStepApproachesContinuous) {
  VehicleParams p;
  OperatingPoint op;
  Eigen::MatrixXd a, b, c;
  VehicleContinuousModel(p, op, &a, &b, &c);
  const double dt = 1e-4;
  const LinearModel m = LinearizeVehicle(p, op, dt);
  const Eigen::MatrixXd ac_est = (m.a - Eigen::MatrixXd::Identity(2, 2)) / dt;
  const Eigen::MatrixXd bc_est = m.b / dt;
  EXPECT_LE((ac_est - a).norm() / a.norm(), 1e-3);
  EXPECT_LE((bc_est - b).norm() / b.norm(), 1e-3);
}

TEST(VehicleModel, PassiveModelIsStable) {
  const LinearModel m = LinearizeVehicle(VehicleParams{}, OperatingPoint{});
  const Eigen::VectorXcd ev = m.a.eigenvalues();
  EXPECT_LT(ev.cwiseAbs().maxCoeff(), 1.0);
  const LinearModel bl =
      LinearizeVehicle(VehicleParams{}, OperatingPoint{}, 0.02, Discretization::kBilinear);
  EXPECT_LT(bl.a.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  OperatingPoint slow;
  slow.v_x = 0.2;
  EXPECT_THROW(LinearizeVehicle(VehicleParams{}, slow), ModelError);
}

}  // namespace
}  // namespace hears
