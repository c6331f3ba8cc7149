#include "hears/envs/hopper.h"

#include <algorithm>
#include <cmath>

namespace hears {

EnergyModel HopperEnergyModel(const HopperOptions& o) {
  const double m = o.mass, inertia = o.inertia, g = o.gravity, k = o.stiffness;
  const double l0 = o.leg_length, w = o.posture_weight;
  // shift so that the standing equilibrium has U = 0
  const double z_rest = l0 - m * g / k;
  const double u_rest = m * g * z_rest;
  std::vector<EnergyTerm> terms;
  terms.push_back({"kinetic_linear", EnergyKind::kKinetic,
                   [=](const EnvState& s) {
                     return 0.5 * m * (s.q_dot[0] * s.q_dot[0] + s.q_dot[1] * s.q_dot[1]);
                   },
                   nullptr});
  terms.push_back({"kinetic_angular", EnergyKind::kKinetic,
                   [=](const EnvState& s) { return 0.5 * inertia * s.q_dot[2] * s.q_dot[2]; },
                   nullptr});
  terms.push_back({"gravity", EnergyKind::kPotential,
                   [=](const EnvState& s) {
                     return m * g * s.q[0] - u_rest - 0.5 * m * m * g * g / k;
                   },
                   [=](const EnvState&) { return std::vector<double>{m * g, 0.0, 0.0}; }});
  terms.push_back({"leg_spring", EnergyKind::kPotential,
                   [=](const EnvState& s) {
                     const double c = std::max(0.0, l0 - s.q[0]);
                     return 0.5 * k * c * c;
                   },
                   [=](const EnvState& s) {
                     const double c = std::max(0.0, l0 - s.q[0]);
                     return std::vector<double>{-k * c, 0.0, 0.0};
                   }});
  terms.push_back({"posture", EnergyKind::kPseudo,
                   [=](const EnvState& s) { return w * s.q[2] * s.q[2]; },
                   [=](const EnvState& s) {
                     return std::vector<double>{0.0, 0.0, 2.0 * w * s.q[2]};
                   }});
  return EnergyModel("hopper", std::move(terms), m * g * l0, 4.0);
}

HopperLite::HopperLite(HopperOptions options)
    : opt_(options), energy_(HopperEnergyModel(options)) {
  if (!(opt_.mass > 0 && opt_.inertia > 0 && opt_.stiffness > 0 && opt_.dt > 0)) {
    throw ModelError("HopperLite: invalid options");
  }
}

double HopperLite::RestHeight() const {
  return opt_.leg_length - opt_.mass * opt_.gravity / opt_.stiffness;
}

EnvState HopperLite::Standing() const {
  EnvState s;
  s.q = {RestHeight(), 0.0, 0.0};
  s.q_dot = {0.0, 0.0, 0.0};
  s.aux = {1.0};
  return s;
}

EnvState HopperLite::Reset(Rng& rng) {
  EnvState s = Standing();
  s.q[0] += rng.Uniform(-0.01, 0.01);
  s.q[2] = rng.Uniform(-0.02, 0.02);
  s.aux[0] = s.q[0] < opt_.leg_length ? 1.0 : 0.0;
  return s;
}

StepResult HopperLite::Step(const EnvState& s, std::span<const double> action) {
  if (action.size() != 3) throw ModelError("HopperLite: action must have 3 components");
  std::vector<double> a(action.begin(), action.end());
  StepResult out;
  out.clipped = ClipAction(a);
  const auto& o = opt_;
  const bool stance = s.q[0] < o.leg_length;
  double az = -o.gravity;
  double ax = 0.0;
  double apitch = a[2] * o.max_torque / o.inertia;
  if (stance) {
    az += (o.stiffness * (o.leg_length - s.q[0]) + a[0] * o.max_thrust) / o.mass;
    ax += a[1] * o.max_push / o.mass;
    apitch += o.mass * o.gravity * o.topple * std::sin(s.q[2]) / o.inertia;
  }
  EnvState& nx = out.next;
  nx.q_dot = {s.q_dot[0] + az * o.dt, s.q_dot[1] + ax * o.dt, s.q_dot[2] + apitch * o.dt};
  nx.q = {s.q[0] + nx.q_dot[0] * o.dt, s.q[1] + nx.q_dot[1] * o.dt,
          WrapAngle(s.q[2] + nx.q_dot[2] * o.dt)};
  const bool next_stance = nx.q[0] < o.leg_length;
  nx.aux = {next_stance ? 1.0 : 0.0};
  nx.t = s.t + 1;
  CheckState(nx, "HopperLite::Step");
  out.contact = stance != next_stance;
  // forward speed plus a small alive bonus
  out.reward = nx.q_dot[1] * o.dt + 0.01;
  if (std::abs(nx.q[2]) > o.fall_pitch || nx.q[0] < 0.3 * o.leg_length) {
    out.reward -= 1.0;
    out.terminal = true;
  }
  out.truncated = !out.terminal && nx.t >= o.max_steps;
  return out;
}

std::vector<double> HopperLite::Observe(const EnvState& s) const {
  return {s.q[0] - opt_.leg_length, s.q_dot[0] / 3.0, s.q_dot[1] / 3.0,
          s.q[2], s.q_dot[2], s.aux.empty() ? 0.0 : s.aux[0], std::tanh(s.q[1] / 10.0)};
}

double HopperLite::TaskPotential(const EnvState& s) const {
  return std::sqrt(std::max(0.0, s.q[1]));
}

double HopperLite::EnergyRate(const EnvState& s, std::span<const double> action) const {
  const auto& o = opt_;
  auto c = [](double v) { return std::clamp(v, -1.0, 1.0); };
  double p = c(action[2]) * o.max_torque * s.q_dot[2];
  // posture pseudo-energy changes with pitch
  p += 2.0 * o.posture_weight * s.q[2] * s.q_dot[2];
  if (s.q[0] < o.leg_length) {
    p += c(action[0]) * o.max_thrust * s.q_dot[0] + c(action[1]) * o.max_push * s.q_dot[1];
    p += o.mass * o.gravity * o.topple * std::sin(s.q[2]) * s.q_dot[2];
  }
  return p;
}

}  // namespace hears
