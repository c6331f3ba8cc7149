#include "hears/envs/pendulum.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hears {

namespace {

// yoshida composition weights
const double kW1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kW0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));
const double kC[4] = {kW1 / 2.0, (kW0 + kW1) / 2.0, (kW0 + kW1) / 2.0, kW1 / 2.0};
const double kD[3] = {kW1, kW0, kW1};

}  // namespace

EnergyModel PendulumEnergyModel(const PendulumOptions& o) {
  const double m = o.mass, l = o.length, g = o.gravity;
  std::vector<EnergyTerm> terms;
  terms.push_back({"kinetic", EnergyKind::kKinetic,
                   [=](const EnvState& s) { return 0.5 * m * l * l * s.q_dot[0] * s.q_dot[0]; },
                   nullptr});
  terms.push_back({"gravity", EnergyKind::kPotential,
                   [=](const EnvState& s) { return m * g * l * (1.0 - std::cos(s.q[0])); },
                   [=](const EnvState& s) {
                     return std::vector<double>{m * g * l * std::sin(s.q[0])};
                   }});
  // 2 m g l is the energy of the upright rest state
  return EnergyModel("pendulum", std::move(terms), 2.0 * m * g * l, 2.0);
}

Pendulum::Pendulum(PendulumOptions options)
    : opt_(options), energy_(PendulumEnergyModel(options)) {
  if (!(opt_.mass > 0 && opt_.length > 0 && opt_.gravity >= 0 && opt_.dt > 0)) {
    throw ModelError("Pendulum: invalid options");
  }
}

EnvState Pendulum::Reset(Rng& rng) {
  EnvState s;
  if (opt_.random_start) {
    s.q = {rng.Uniform(-std::numbers::pi, std::numbers::pi)};
    s.q_dot = {rng.Uniform(-1.0, 1.0)};
  } else {
    s.q = {0.0};
    s.q_dot = {0.0};
  }
  return s;
}

void Pendulum::Integrate(double& theta, double& omega, double torque, double h) const {
  const double ml2 = opt_.mass * opt_.length * opt_.length;
  const double gl = opt_.gravity / opt_.length;
  for (int i = 0; i < 3; ++i) {
    theta += kC[i] * omega * h;
    const double acc = -gl * std::sin(theta) + (torque - opt_.damping * omega) / ml2;
    omega += kD[i] * acc * h;
  }
  theta += kC[3] * omega * h;
}

StepResult Pendulum::Step(const EnvState& s, std::span<const double> action) {
  if (action.size() != 1) throw ModelError("Pendulum: action must have 1 component");
  std::vector<double> a(action.begin(), action.end());
  StepResult out;
  out.clipped = ClipAction(a);
  const double u = a[0] * opt_.max_torque;
  double theta = s.q[0];
  double omega = s.q_dot[0];
  Integrate(theta, omega, u, opt_.dt);
  out.next.q = {WrapAngle(theta)};
  out.next.q_dot = {omega};
  out.next.t = s.t + 1;
  CheckState(out.next, "Pendulum::Step");
  // cost on distance from upright, speed and torque
  const double phi = WrapAngle(s.q[0] - std::numbers::pi);
  out.reward = -(phi * phi + 0.1 * s.q_dot[0] * s.q_dot[0] + 0.001 * u * u);
  out.truncated = out.next.t >= opt_.max_steps;
  return out;
}

std::vector<double> Pendulum::Observe(const EnvState& s) const {
  return {std::cos(s.q[0]), std::sin(s.q[0]), s.q_dot[0] / 8.0};
}

double Pendulum::TaskPotential(const EnvState& s) const {
  return -(1.0 + std::cos(s.q[0]));
}

double Pendulum::EnergyRate(const EnvState& s, std::span<const double> action) const {
  const double u = std::clamp(action[0], -1.0, 1.0) * opt_.max_torque;
  const double w = s.q_dot[0];
  return w * (u - opt_.damping * w);
}

}  // namespace hears
