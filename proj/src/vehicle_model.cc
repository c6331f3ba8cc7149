#include "hears/vehicle_model.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "hears/types.h"

namespace hears {

void VehicleParams::Validate() const {
  if (!(mass > 0 && yaw_inertia > 0 && cg_height > 0 && a > 0 && b > 0 &&
        track_front > 0 && track_rear > 0 && cf >= 0 && cr >= 0 && gravity > 0)) {
    throw ModelError("VehicleParams: all quantities must be positive");
  }
}

double TireLateralForce(double slip_angle, double normal_load, double mu,
                        double cornering_stiffness) {
  if (!(mu > 0.0) || !(normal_load > 0.0)) {
    throw ModelError("TireLateralForce: mu and load must be positive");
  }
  const double cap = mu * normal_load;
  return cap * std::tanh(cornering_stiffness * slip_angle / cap);
}

double TireLocalStiffness(double slip_angle, double normal_load, double mu,
                          double cornering_stiffness) {
  const double cap = mu * normal_load;
  const double th = std::tanh(cornering_stiffness * slip_angle / cap);
  return cornering_stiffness * (1.0 - th * th);
}

void VehicleContinuousModel(const VehicleParams& p, const OperatingPoint& op,
                            Eigen::MatrixXd* a, Eigen::MatrixXd* b, Eigen::MatrixXd* c) {
  const double cf = op.cf > 0.0 ? op.cf : p.cf;
  const double cr = op.cr > 0.0 ? op.cr : p.cr;
  const double m = p.mass, iz = p.yaw_inertia, vx = op.v_x;
  *a = Eigen::MatrixXd(2, 2);
  *b = Eigen::MatrixXd(2, 2);
  *c = Eigen::MatrixXd(2, 2);
  // slip: alpha_f = steer - (v_y + a r) / v_x, alpha_r = -(v_y - b r) / v_x
  (*a)(0, 0) = -(cf + cr) / (m * vx);
  (*a)(0, 1) = (-p.a * cf + p.b * cr) / (m * vx) - vx;
  (*a)(1, 0) = (-p.a * cf + p.b * cr) / (iz * vx);
  (*a)(1, 1) = -(p.a * p.a * cf + p.b * p.b * cr) / (iz * vx);
  (*b)(0, 0) = cf / m;
  (*b)(0, 1) = 0.0;
  (*b)(1, 0) = p.a * cf / iz;
  (*b)(1, 1) = 1.0 / iz;
  (*c) << 1.0 / vx, 0.0, 0.0, 1.0;
}

LinearModel LinearizeVehicle(const VehicleParams& p, const OperatingPoint& op, double dt,
                             Discretization method) {
  p.Validate();
  if (!(op.v_x > 0.5)) throw ModelError("LinearizeVehicle: v_x must exceed 0.5 m/s");
  if (!(dt > 0.0)) throw ModelError("LinearizeVehicle: dt must be positive");
  Eigen::MatrixXd ac, bc, cc;
  VehicleContinuousModel(p, op, &ac, &bc, &cc);
  LinearModel out;
  out.c = cc;
  out.dt = dt;
  if (method == Discretization::kZeroOrderHold) {
    // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m.topLeftCorner(2, 2) = ac * dt;
    m.topRightCorner(2, 2) = bc * dt;
    const Eigen::MatrixXd e = m.exp();
    out.a = e.topLeftCorner(2, 2);
    out.b = e.topRightCorner(2, 2);
  } else {
    const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd inv = (i - 0.5 * dt * ac).inverse();
    out.a = inv * (i + 0.5 * dt * ac);
    out.b = inv * bc * dt;
  }
  return out;
}

}  // namespace hears
