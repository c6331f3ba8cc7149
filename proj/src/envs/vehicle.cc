#include "hears/envs/vehicle.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hears {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 Pack(const EnvState& s) {
  Vec6 x;
  x << s.q[0], s.q[1], s.q[2], s.q_dot[0], s.q_dot[1], s.q_dot[2];
  return x;
}

enum Aux { kSteer = 0, kMoment, kPrevYaw, kA0, kA1, kA2, kLatAcc, kAuxSize };

}  // namespace

double CooperationSigmoid(double f) { return 1.0 / (1.0 + std::exp(-15.0 * (f - 0.85))); }

VehicleRewardTerms VehicleBaseReward(const VehicleRewardInputs& in,
                                     const VehicleRewardWeights& w) {
  if (!in.feasibility || !in.y_ref || !in.y_exec) {
    throw ModelError("VehicleBaseReward: MPC report fields missing");
  }
  if (!(in.v_target > 0.0)) throw ModelError("VehicleBaseReward: v_target must be positive");
  VehicleRewardTerms t;
  const double sig = CooperationSigmoid(*in.feasibility);
  double dev = 0.0;
  for (int i = 0; i < 2; ++i) dev += std::abs((*in.y_ref)[i] - (*in.y_exec)[i]) / in.y_max[i];
  t.ref_exec = 2.0 * std::exp(-2.0 * dev);
  t.coop = 3.0 * sig - 0.5 * (1.0 - sig) + t.ref_exec + w.state_dependent;
  const double vt2 = in.v_target * in.v_target;
  const double dv = in.v_x - in.v_target;
  t.speed = (vt2 - dv * dv) / vt2;
  const double e = std::abs(in.lateral_error);
  t.path = e < 1.0 ? 5.0 * (1.0 - e) : -2.0 * std::pow(e - 1.0, 1.5);
  t.look = 0.7 * std::exp(-in.look1 * in.look1 / (2.0 * 0.09)) +
           0.3 * std::exp(-in.look2 * in.look2 / (2.0 * 0.09));
  t.head = std::exp(-3.0 * std::abs(in.heading_error));
  t.stab = (std::exp(-3.0 * std::abs(in.yaw_rate)) + std::exp(-5.0 * std::abs(in.sideslip)) +
            std::exp(-5.0 * in.ltr * in.ltr)) /
           3.0;
  t.terminal = in.terminal_failure ? w.terminal_penalty : 0.0;
  t.base = w.coop * t.coop + w.speed * t.speed + w.path * t.path + w.look * t.look +
           w.head * t.head + w.stab * t.stab + t.terminal;
  t.train = w.final_scale * t.base;
  return t;
}

double VehicleTaskPotential(const VehicleTaskInputs& in) {
  const double track = 10.0 * std::exp(-0.5 * in.v_y * in.v_y);
  const double stab =
      5.0 * std::exp(-3.0 * (in.sideslip * in.sideslip + 0.5 * in.yaw_rate * in.yaw_rate));
  const double head = 3.0 * std::exp(-5.0 * in.heading_error * in.heading_error);
  const double dv = in.v_x - in.v_target;
  const double speed = 4.0 * std::exp(-0.05 * dv * dv);
  const double prog = 10.0 * std::min(in.progress / in.progress_max, 1.0);
  return 0.35 * track + 0.25 * stab + 0.15 * head + 0.15 * speed + 0.10 * prog;
}

EnergyModel VehicleEnergyModel(const VehicleEnergyParams& p) {
  auto terms = [p](const EnvState& s) {
    const double r_prev = s.aux.size() > kPrevYaw ? s.aux[kPrevYaw] : s.q_dot[2];
    return VehicleInternalEnergyTerms(s.q_dot[0], s.q_dot[1], s.q_dot[2], r_prev, p);
  };
  std::vector<EnergyTerm> t;
  t.push_back({"E_lin", EnergyKind::kKinetic, [=](const EnvState& s) { return terms(s).lin; },
               nullptr});
  t.push_back({"E_ang", EnergyKind::kKinetic, [=](const EnvState& s) { return terms(s).ang; },
               nullptr});
  auto zero = [](const EnvState& s) { return std::vector<double>(s.q.size(), 0.0); };
  t.push_back({"E_slip", EnergyKind::kPseudo, [=](const EnvState& s) { return terms(s).slip; },
               zero});
  t.push_back({"E_dr", EnergyKind::kPseudo,
               [=](const EnvState& s) { return terms(s).yaw_change; }, zero});
  t.push_back({"E_dv", EnergyKind::kPseudo,
               [=](const EnvState& s) { return terms(s).speed_dev; }, zero});
  return EnergyModel("vehicle", std::move(t), 1.0, 10.0);
}

BicycleVehicle::BicycleVehicle(VehicleOptions options)
    : opt_(std::move(options)), energy_(VehicleEnergyModel(opt_.energy)) {
  opt_.params.Validate();
  if (!(opt_.dt > 0.0 && opt_.v_target > 0.0 && opt_.road_length > 0.0)) {
    throw ModelError("BicycleVehicle: invalid options");
  }
  if (opt_.k_beta <= 0.0) opt_.k_beta = 0.5 * opt_.params.yaw_inertia;
  opt_.energy.v_target = opt_.v_target;
  opt_.energy.v_ideal = opt_.v_target;
  energy_ = VehicleEnergyModel(opt_.energy);
  road_ = GenerateRoad(opt_.road_seed, opt_.road_length, opt_.road_spec);
  max_steps_ = opt_.max_steps > 0
                   ? opt_.max_steps
                   : static_cast<int>((opt_.road_length / opt_.v_target + 12.0) / opt_.dt);
}

void BicycleVehicle::SetRoad(RoadProfile road) {
  road.Validate();
  road_ = std::move(road);
}

Vec6 BicycleVehicle::Derivative(const Vec6& x, const VehicleInputs& u) const {
  const auto& p = opt_.params;
  const double s = x[0], ey = x[1], epsi = x[2], vx = x[3], vy = x[4], r = x[5];
  const double mu = road_.Friction(s);
  const double kappa = road_.Curvature(s);
  const double lat = road_.LateralSlopeDeg(s) * kDeg;
  const double lon = road_.LongitudinalSlopeDeg(s) * kDeg;
  // slip angles need a floor on v_x near standstill
  const double v_eff = std::max(vx, 1.0);
  const double alpha_f = u.steer - std::atan((vy + p.a * r) / v_eff);
  const double alpha_r = -std::atan((vy - p.b * r) / v_eff);
  const double fyf = TireLateralForce(alpha_f, p.front_load(), mu, p.cf);
  const double fyr = TireLateralForce(alpha_r, p.rear_load(), mu, p.cr);
  const double fx_cap = 0.9 * mu * p.mass * p.gravity;
  const double fx = std::clamp(p.mass * u.accel, -fx_cap, fx_cap);
  Vec6 d;
  double vx_dot = (fx - fyf * std::sin(u.steer)) / p.mass + vy * r - p.gravity * std::sin(lon);
  // no reversing: hold at standstill against backward forces
  if (vx <= 0.0 && vx_dot < 0.0) vx_dot = 0.0;
  const double vy_dot =
      (fyf * std::cos(u.steer) + fyr) / p.mass - vx * r - p.gravity * std::sin(lat);
  const double r_dot = (p.a * fyf * std::cos(u.steer) - p.b * fyr + u.yaw_moment) / p.yaw_inertia;
  const double s_dot = (vx * std::cos(epsi) - vy * std::sin(epsi)) / (1.0 - kappa * ey);
  d << s_dot, vx * std::sin(epsi) + vy * std::cos(epsi), r - kappa * s_dot, vx_dot, vy_dot,
      r_dot;
  return d;
}

EnvState BicycleVehicle::Integrate(const EnvState& s, const VehicleInputs& u, double h) const {
  const Vec6 x = Pack(s);
  const Vec6 k1 = Derivative(x, u);
  const Vec6 k2 = Derivative(x + 0.5 * h * k1, u);
  const Vec6 k3 = Derivative(x + 0.5 * h * k2, u);
  const Vec6 k4 = Derivative(x + h * k3, u);
  const Vec6 y = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  EnvState out = s;
  out.q = {y[0], y[1], WrapAngle(y[2])};
  out.q_dot = {std::max(y[3], 0.0), y[4], y[5]};
  return out;
}

double BicycleVehicle::MechanicalEnergy(const EnvState& s) const {
  const auto& p = opt_.params;
  const double vx = s.q_dot[0], vy = s.q_dot[1], r = s.q_dot[2];
  return 0.5 * p.mass * (vx * vx + vy * vy) + 0.5 * p.yaw_inertia * r * r;
}

double BicycleVehicle::MechanicalEnergyRate(const EnvState& s, const VehicleInputs& u) const {
  const auto& p = opt_.params;
  const Vec6 d = Derivative(Pack(s), u);
  return p.mass * (s.q_dot[0] * d[3] + s.q_dot[1] * d[4]) + p.yaw_inertia * s.q_dot[2] * d[5];
}

double BicycleVehicle::Sideslip(const EnvState& s) const {
  return std::atan2(s.q_dot[1], std::max(s.q_dot[0], 1.0));
}

double BicycleVehicle::Lyapunov(const EnvState& s) const {
  const double r = s.q_dot[2], beta = Sideslip(s);
  return 0.5 * opt_.params.yaw_inertia * r * r + opt_.k_beta * beta * beta;
}

EnvState BicycleVehicle::Reset(Rng& rng) {
  if (!opt_.fixed_road) {
    road_ = GenerateRoad(rng.Next(), opt_.road_length, opt_.road_spec);
  }
  mpc_.Reset();
  info_ = {};
  EnvState s;
  s.q = {0.0, 0.0, 0.0};
  s.q_dot = {0.0, 0.0, 0.0};
  s.aux.assign(kAuxSize, 0.0);
  return s;
}

MpcProblem BicycleVehicle::BuildMpcProblem(const EnvState& s) const {
  const auto& p = opt_.params;
  const double vx = s.q_dot[0];
  const double mu = road_.Friction(s.q[0]);
  const double v_eff = std::max(vx, 1.0);
  const double vy = s.q_dot[1], r = s.q_dot[2];
  const double alpha_f = s.aux[kSteer] - std::atan((vy + p.a * r) / v_eff);
  const double alpha_r = -std::atan((vy - p.b * r) / v_eff);
  OperatingPoint op;
  op.v_x = vx;
  // local slope of the tire law, floored so the model keeps its input channel
  op.cf = std::max(TireLocalStiffness(alpha_f, p.front_load(), mu, p.cf), 0.05 * p.cf);
  op.cr = std::max(TireLocalStiffness(alpha_r, p.rear_load(), mu, p.cr), 0.05 * p.cr);
  MpcProblem prob;
  prob.model = LinearizeVehicle(p, op, opt_.dt, opt_.discretization);
  prob.n_predict = opt_.n_predict;
  prob.n_control = opt_.n_control;
  prob.q = Eigen::Vector2d(opt_.q_beta, opt_.q_r).asDiagonal();
  prob.r = Eigen::Vector2d(opt_.r_steer, opt_.r_moment).asDiagonal();
  prob.u_min = Eigen::Vector2d(-opt_.steer_max, -opt_.yaw_moment_max);
  prob.u_max = Eigen::Vector2d(opt_.steer_max, opt_.yaw_moment_max);
  prob.du_max = Eigen::Vector2d(opt_.steer_rate * opt_.dt, opt_.yaw_moment_rate * opt_.dt);
  // stability envelope: sideslip and the friction-limited yaw rate
  prob.y_abs_max = Eigen::Vector2d(opt_.beta_envelope, mu * p.gravity / v_eff);
  prob.y_track_tol = Eigen::Vector2d(opt_.beta_track_tol, opt_.r_track_tol);
  prob.max_iters = 150;
  prob.tol = 1e-7;
  return prob;
}

double BicycleVehicle::Acceleration(double v_x, double a2) const {
  const double cmd = opt_.speed_gain * (opt_.v_target - v_x) + a2 * opt_.accel_max;
  return std::clamp(cmd, -opt_.accel_max, opt_.accel_max);
}

StepResult BicycleVehicle::Step(const EnvState& s, std::span<const double> action) {
  if (action.size() != 3) throw ModelError("BicycleVehicle: action must have 3 components");
  if (s.aux.size() != kAuxSize) throw ModelError("BicycleVehicle: malformed state");
  std::vector<double> a(action.begin(), action.end());
  StepResult out;
  out.clipped = ClipAction(a);
  const double vx = s.q_dot[0];
  const double kappa = road_.Curvature(s.q[0]);
  info_ = {};
  info_.r_ref = vx * kappa - opt_.heading_gain * s.q[2] - opt_.lateral_gain * s.q[1] +
                a[0] * opt_.r_residual_max;
  info_.beta_ref = a[1] * opt_.beta_ref_max;
  info_.accel = Acceleration(vx, a[2]);

  VehicleInputs u;
  u.accel = info_.accel;
  const Eigen::Vector2d u_prev(s.aux[kSteer], s.aux[kMoment]);
  if (vx > opt_.low_speed_guard) {
    const MpcProblem prob = BuildMpcProblem(s);
    const Eigen::Vector2d x0(s.q_dot[1], s.q_dot[2]);
    Eigen::MatrixXd y_ref(prob.n_predict, 2);
    y_ref.col(0).setConstant(info_.beta_ref);
    y_ref.col(1).setConstant(info_.r_ref);
    const MpcReport rep = mpc_.Solve(prob, x0, y_ref, u_prev);
    u.steer = rep.u0[0];
    u.yaw_moment = rep.u0[1];
    info_.feasibility = rep.feasibility_ratio;
    info_.mpc_converged = rep.converged;
    info_.mpc_iterations = rep.iterations;
    info_.mpc_cost = rep.cost;
  } else {
    // open-loop low-speed mode: wheels straight, no yaw moment, within rate
    info_.low_speed = true;
    u.steer = std::clamp(0.0, u_prev[0] - opt_.steer_rate * opt_.dt,
                         u_prev[0] + opt_.steer_rate * opt_.dt);
    u.yaw_moment = std::clamp(0.0, u_prev[1] - opt_.yaw_moment_rate * opt_.dt,
                              u_prev[1] + opt_.yaw_moment_rate * opt_.dt);
    mpc_.Reset();
  }
  info_.steer = u.steer;
  info_.yaw_moment = u.yaw_moment;
  const double tol = 1e-9;
  info_.inputs_within_bounds =
      std::abs(u.steer) <= opt_.steer_max + tol &&
      std::abs(u.yaw_moment) <= opt_.yaw_moment_max + tol &&
      std::abs(u.steer - u_prev[0]) <= opt_.steer_rate * opt_.dt + tol &&
      std::abs(u.yaw_moment - u_prev[1]) <= opt_.yaw_moment_rate * opt_.dt + tol;

  EnvState nx = Integrate(s, u, opt_.dt);
  nx.t = s.t + 1;
  nx.aux = {u.steer, u.yaw_moment, s.q_dot[2], a[0], a[1], a[2], 0.0};
  const Vec6 d1 = Derivative(Pack(nx), u);
  // lateral acceleration a_y = v_y_dot + v_x r at the new state
  nx.aux[kLatAcc] = d1[4] + nx.q_dot[0] * nx.q_dot[2];
  CheckState(nx, "BicycleVehicle::Step");

  const double beta = Sideslip(nx);
  const double ey = nx.q[1], epsi = nx.q[2];
  const double kappa1 = road_.Curvature(nx.q[0]);
  auto bearing = [&](double dist) {
    return std::atan2(0.5 * kappa1 * dist * dist - ey, dist) - epsi;
  };
  const auto& p = opt_.params;
  const double track = 0.5 * (p.track_front + p.track_rear);
  const bool failed =
      std::abs(ey) > road_.half_width || std::abs(beta) > opt_.beta_fail_deg * kDeg;
  VehicleRewardInputs in;
  in.feasibility = info_.feasibility;
  in.y_ref = Eigen::Vector2d(info_.beta_ref, info_.r_ref);
  in.y_exec = Eigen::Vector2d(beta, nx.q_dot[2]);
  in.y_max = opt_.y_max;
  in.v_x = nx.q_dot[0];
  in.v_target = opt_.v_target;
  in.lateral_error = ey;
  in.look1 = bearing(opt_.preview1);
  in.look2 = bearing(opt_.preview2);
  in.heading_error = epsi;
  in.yaw_rate = nx.q_dot[2];
  in.sideslip = beta;
  in.ltr = 2.0 * nx.aux[kLatAcc] * p.cg_height / (p.gravity * track);
  in.terminal_failure = failed;
  info_.reward = VehicleBaseReward(in, opt_.weights);
  out.reward = info_.reward.train;
  out.terminal = failed || nx.q[0] >= road_.length;
  out.truncated = !out.terminal && nx.t >= max_steps_;
  out.next = std::move(nx);
  return out;
}

std::vector<double> BicycleVehicle::Observe(const EnvState& s) const {
  const double sp = s.q[0];
  const double k = 50.0;
  return {s.q[1] / road_.half_width,
          s.q[2] * 5.0,
          s.q_dot[0] / opt_.v_target - 1.0,
          s.q_dot[1],
          s.q_dot[2] * 2.0,
          road_.Curvature(sp) * k,
          road_.Curvature(sp + 10.0) * k,
          road_.Curvature(sp + 20.0) * k,
          road_.Friction(sp),
          road_.Friction(sp + 10.0),
          Sideslip(s) * 10.0,
          s.aux[kSteer] / opt_.steer_max,
          sp / road_.length};
}

double BicycleVehicle::TaskPotential(const EnvState& s) const {
  VehicleTaskInputs in;
  in.v_x = s.q_dot[0];
  in.v_y = s.q_dot[1];
  in.yaw_rate = s.q_dot[2];
  in.sideslip = Sideslip(s);
  in.heading_error = s.q[2];
  in.progress = s.q[0];
  in.progress_max = road_.length;
  in.v_target = opt_.v_target;
  return VehicleTaskPotential(in);
}

double BicycleVehicle::EnergyRate(const EnvState& s, std::span<const double> action) const {
  VehicleInputs u;
  u.steer = s.aux[kSteer];
  u.yaw_moment = s.aux[kMoment];
  u.accel = Acceleration(s.q_dot[0], std::clamp(action[2], -1.0, 1.0));
  return MechanicalEnergyRate(s, u);
}

double BicycleVehicle::ActionEnergy(std::span<const double> action) const {
  double e = 0.0;
  for (double a : action) e += a * a;
  e *= 0.5;
  const double rt = std::abs(action[0]), bt = std::abs(action[1]);
  if (rt > 0.3) e += 2.0 * (rt - 0.3) * (rt - 0.3);
  if (bt > 0.3) e += 3.0 * (bt - 0.3) * (bt - 0.3);
  return e;
}

double BicycleVehicle::ActionEnergy(const EnvState& s, std::span<const double> action) const {
  double e = ActionEnergy(action);
  for (int i = 0; i < 3; ++i) {
    const double d = action[i] - s.aux[kA0 + i];
    e += d * d;
  }
  return e;
}

}  // namespace hears
