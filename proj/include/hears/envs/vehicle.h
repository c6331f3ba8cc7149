#ifndef HEARS_ENVS_VEHICLE_H_
#define HEARS_ENVS_VEHICLE_H_

#include <optional>

#include <Eigen/Dense>

#include "hears/energy.h"
#include "hears/envs/env.h"
#include "hears/envs/road.h"
#include "hears/mpc.h"
#include "hears/vehicle_model.h"

namespace hears {

struct VehicleRewardWeights {
  double coop = 1.0;
  double speed = 1.5;
  double path = 1.0;
  double look = 1.2;
  double head = 1.2;
  double stab = 0.8;
  double final_scale = 0.05;
  double terminal_penalty = -10.0;
  double state_dependent = 0.0;  // hook for the cooperation state term
};

struct VehicleRewardInputs {
  std::optional<double> feasibility;         // MPC feasibility ratio f
  std::optional<Eigen::Vector2d> y_ref;      // (beta_ref, r_ref)
  std::optional<Eigen::Vector2d> y_exec;     // executed (beta, r)
  Eigen::Vector2d y_max{0.17, 1.0};          // (beta, r) normalizers
  double v_x = 0.0;
  double v_target = 15.0;
  double lateral_error = 0.0;  // m
  double look1 = 0.0;          // bearing to the 5 m preview point, rad
  double look2 = 0.0;          // bearing to the 10 m preview point, rad
  double heading_error = 0.0;  // rad
  double yaw_rate = 0.0;
  double sideslip = 0.0;
  double ltr = 0.0;            // load transfer ratio
  bool terminal_failure = false;
};

struct VehicleRewardTerms {
  double coop = 0.0;
  double ref_exec = 0.0;
  double speed = 0.0;
  double path = 0.0;
  double look = 0.0;
  double head = 0.0;
  double stab = 0.0;
  double terminal = 0.0;
  double base = 0.0;   // weighted sum
  double train = 0.0;  // final_scale * base
};

// 1 / (1 + exp(-15 (f - 0.85)))
double CooperationSigmoid(double f);

// Throws ModelError if the MPC fields are missing.
VehicleRewardTerms VehicleBaseReward(const VehicleRewardInputs& in,
                                     const VehicleRewardWeights& w = {});

struct VehicleTaskInputs {
  double v_x = 0.0, v_y = 0.0, yaw_rate = 0.0, sideslip = 0.0, heading_error = 0.0;
  double progress = 0.0, progress_max = 1.0, v_target = 15.0;
};

// 0.35 track + 0.25 stab + 0.15 head + 0.15 speed + 0.10 progress
double VehicleTaskPotential(const VehicleTaskInputs& in);

struct VehicleOptions {
  VehicleParams params;
  RoadSegmentSpec road_spec;
  double road_length = kTrainRoadLength;
  uint64_t road_seed = 1;
  bool fixed_road = true;  // else every reset draws a road seed from the rng
  double v_target = 15.0;
  double dt = 0.02;
  int max_steps = 0;  // 0: derived from the road length
  // action mapping: yaw-rate residual, sideslip reference, acceleration
  double r_residual_max = 0.3;   // rad/s
  double beta_ref_max = 0.05;    // rad
  double accel_max = 2.5;        // m/s^2
  double speed_gain = 0.5;       // 1/s; cruise feedback under the accel residual
  double heading_gain = 2.0;     // 1/s; path feedback under the yaw-rate residual
  double lateral_gain = 0.1;     // 1/(m s)
  // mpc
  int n_predict = 10;
  int n_control = 5;
  double steer_max = 0.5;        // rad
  double steer_rate = 0.5;       // rad/s
  double yaw_moment_max = 4000;  // N m
  double yaw_moment_rate = 20000;  // N m / s
  double q_beta = 1.0 / (0.02 * 0.02);
  double q_r = 1.0 / (0.05 * 0.05);
  double r_steer = 0.1 / (0.01 * 0.01);
  double r_moment = 0.1 / (400.0 * 400.0);
  double beta_envelope = 0.1;     // |beta| limit counted by f, rad
  double beta_track_tol = 0.02;   // rad
  double r_track_tol = 0.05;      // rad/s
  double low_speed_guard = 0.5;   // m/s; below it the mpc is bypassed
  Discretization discretization = Discretization::kZeroOrderHold;
  // rewards and energies
  VehicleRewardWeights weights;
  Eigen::Vector2d y_max{0.17, 1.0};
  double beta_fail_deg = 10.0;
  double preview1 = 5.0;
  double preview2 = 10.0;
  VehicleEnergyParams energy;
  double k_beta = 0.0;  // Lyapunov weight on beta^2; 0 means I_z / 2
};

// Per-step diagnostics of the last Step call.
struct VehicleStepInfo {
  double steer = 0.0;
  double yaw_moment = 0.0;
  double accel = 0.0;
  double beta_ref = 0.0;
  double r_ref = 0.0;
  double feasibility = 1.0;
  bool mpc_converged = true;
  bool low_speed = false;
  int mpc_iterations = 0;
  double mpc_cost = 0.0;
  bool inputs_within_bounds = true;
  VehicleRewardTerms reward;
};

// Plant inputs held over a step.
struct VehicleInputs {
  double steer = 0.0;
  double yaw_moment = 0.0;
  double accel = 0.0;  // commanded longitudinal acceleration
};

// Nonlinear single-track vehicle on a road in Frenet coordinates.
// q = (s, e_y, e_psi): arc length, lateral offset, heading error.
// q_dot = (v_x, v_y, r): body velocities and yaw rate.
// aux = (steer, M_z, r_prev, a0_prev, a1_prev, a2_prev, a_y).
// Actions a in [-1, 1]^3 become (r_ref = v_x kappa - k_psi e_psi - k_y e_y +
// a0 r_residual_max,
// beta_ref = a1 beta_ref_max, accel = k_v (v_target - v_x) + a2 accel_max,
// clamped to accel_max); the lower-layer MPC
// turns the references into (steer, M_z). RK4 integration.
class BicycleVehicle : public Env {
 public:
  explicit BicycleVehicle(VehicleOptions options = {});

  std::string name() const override { return "vehicle"; }
  int action_dim() const override { return 3; }
  int obs_dim() const override { return 13; }
  double dt() const override { return opt_.dt; }
  int max_steps() const override { return max_steps_; }

  EnvState Reset(Rng& rng) override;
  StepResult Step(const EnvState& s, std::span<const double> action) override;
  std::vector<double> Observe(const EnvState& s) const override;

  double TaskPotential(const EnvState& s) const override;
  // the dimensionless internal energy used for shaping
  const EnergyModel& energy() const override { return energy_; }
  // d/dt of the mechanical energy under the inputs held in aux
  double EnergyRate(const EnvState& s, std::span<const double> action) const override;
  // commanded longitudinal acceleration for action component a2
  double Acceleration(double v_x, double a2) const;
  // 0.5 |a|^2 + turn and slip penalties + |a - a_prev|^2
  double ActionEnergy(std::span<const double> action) const override;
  double ActionEnergy(const EnvState& s, std::span<const double> action) const override;
  double RewardScale() const override { return 1.0; }

  const VehicleOptions& options() const { return opt_; }
  const RoadProfile& road() const { return road_; }
  void SetRoad(RoadProfile road);
  const VehicleStepInfo& last_info() const { return info_; }

  // plant pieces, exposed for checks
  // time derivative of (q, q_dot) packed as 6-vector
  Eigen::Matrix<double, 6, 1> Derivative(const Eigen::Matrix<double, 6, 1>& x,
                                         const VehicleInputs& u) const;
  // one RK4 step of length h
  EnvState Integrate(const EnvState& s, const VehicleInputs& u, double h) const;
  double MechanicalEnergy(const EnvState& s) const;
  double MechanicalEnergyRate(const EnvState& s, const VehicleInputs& u) const;
  double Lyapunov(const EnvState& s) const;
  double Sideslip(const EnvState& s) const;

  MpcProblem BuildMpcProblem(const EnvState& s) const;

 private:
  VehicleOptions opt_;
  RoadProfile road_;
  EnergyModel energy_;
  MpcController mpc_;
  VehicleStepInfo info_;
  int max_steps_ = 0;
};

EnergyModel VehicleEnergyModel(const VehicleEnergyParams& p);

}  // namespace hears

#endif  // HEARS_ENVS_VEHICLE_H_
