#ifndef HEARS_VEHICLE_MODEL_H_
#define HEARS_VEHICLE_MODEL_H_

#include <Eigen/Dense>

namespace hears {

// Body parameters of the test vehicle, SI units.
struct VehicleParams {
  double mass = 2100.0;      // kg
  double yaw_inertia = 4116.0;  // kg m^2
  double cg_height = 0.71;   // m
  double a = 1.35;           // cg to front axle, m
  double b = 1.45;           // cg to rear axle, m
  double track_front = 1.8;  // m
  double track_rear = 1.8;   // m
  double cf = 90000.0;       // front axle cornering stiffness, N/rad
  double cr = 100000.0;      // rear axle cornering stiffness, N/rad
  double gravity = 9.81;

  double wheelbase() const { return a + b; }
  double front_load() const { return mass * gravity * b / wheelbase(); }
  double rear_load() const { return mass * gravity * a / wheelbase(); }
  // throws ModelError unless every quantity is positive
  void Validate() const;
};

// Saturating lateral tire law F = mu Fz tanh(C alpha / (mu Fz)): slope C at
// zero slip, odd, and bounded by mu Fz.
double TireLateralForce(double slip_angle, double normal_load, double mu,
                        double cornering_stiffness);

// d F / d alpha of the law above
double TireLocalStiffness(double slip_angle, double normal_load, double mu,
                          double cornering_stiffness);

// x_{k+1} = A x_k + B u_k, y_k = C x_k
struct LinearModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  double dt = 0.0;
};

enum class Discretization { kZeroOrderHold, kBilinear };

struct OperatingPoint {
  double v_x = 15.0;
  double cf = 0.0;  // local axle stiffnesses; <= 0 means the nominal ones
  double cr = 0.0;
};

// Continuous 2-state lateral model, state (v_y, r), inputs (steer, M_z),
// outputs (beta ~ v_y / v_x, r).
void VehicleContinuousModel(const VehicleParams& p, const OperatingPoint& op,
                            Eigen::MatrixXd* a, Eigen::MatrixXd* b, Eigen::MatrixXd* c);

// Discretized lateral model. Throws ModelError for v_x <= 0.5 m/s.
LinearModel LinearizeVehicle(const VehicleParams& p, const OperatingPoint& op,
                             double dt = 0.02,
                             Discretization method = Discretization::kZeroOrderHold);

}  // namespace hears

#endif  // HEARS_VEHICLE_MODEL_H_
