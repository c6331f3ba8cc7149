#include "hears/envs/lander.h"

#include <algorithm>
#include <cmath>

namespace hears {

namespace {

struct Foot {
  double rx, ry;     // position relative to the centre of mass
  double height;     // above ground
  double vx, vy;     // world velocity
};

// feet sit at body-frame offsets (side * half_span, -drop) from the centre of
// mass; y is shifted so that the level feet are at height y
Foot FootOf(const LanderOptions& o, const EnvState& s, int side) {
  const double th = s.q[2];
  const double c = std::cos(th), sn = std::sin(th);
  const double bx = side * o.leg_half_span, by = -o.leg_drop;
  Foot f;
  f.rx = bx * c - by * sn;
  f.ry = bx * sn + by * c;
  f.height = s.q[1] + o.leg_drop + f.ry;
  const double w = s.q_dot[2];
  f.vx = s.q_dot[0] - w * f.ry;
  f.vy = s.q_dot[1] + w * f.rx;
  return f;
}

double Penetration(const LanderOptions& o, const EnvState& s, int side) {
  return std::max(0.0, -FootOf(o, s, side).height);
}

}  // namespace

EnergyModel LanderEnergyModel(const LanderOptions& o) {
  const double m = o.mass, inertia = o.inertia, g = o.gravity, k = o.leg_stiffness;
  // datum chosen so that U = 0 at the static rest pose, its minimum
  const double y_rest = -m * g / (2.0 * k);
  const double spring_rest = k * y_rest * y_rest;
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
                   [=](const EnvState& s) { return m * g * (s.q[1] - y_rest) - spring_rest; },
                   [=](const EnvState&) { return std::vector<double>{0.0, m * g, 0.0}; }});
  terms.push_back({"leg_springs", EnergyKind::kPotential,
                   [=](const EnvState& s) {
                     double e = 0.0;
                     for (int side : {-1, 1}) {
                       const double p = Penetration(o, s, side);
                       e += 0.5 * k * p * p;
                     }
                     return e;
                   },
                   [=](const EnvState& s) {
                     std::vector<double> g3(3, 0.0);
                     for (int side : {-1, 1}) {
                       const double p = Penetration(o, s, side);
                       if (p <= 0.0) continue;
                       const Foot f = FootOf(o, s, side);
                       // p = -height, d height / d theta = rx
                       g3[1] += k * p * -1.0;
                       g3[2] += k * p * -f.rx;
                     }
                     return g3;
                   }});
  return EnergyModel("lander", std::move(terms), m * g * 5.0, 4.0);
}

Lander2D::Lander2D(LanderOptions options)
    : opt_(options), energy_(LanderEnergyModel(options)) {
  if (!(opt_.mass > 0 && opt_.inertia > 0 && opt_.leg_stiffness > 0 && opt_.dt > 0)) {
    throw ModelError("Lander2D: invalid options");
  }
}

double Lander2D::FootHeight(const EnvState& st, int side) const {
  return FootOf(opt_, st, side).height;
}

double Lander2D::RestHeight() const {
  return -opt_.mass * opt_.gravity / (2.0 * opt_.leg_stiffness);
}

EnvState Lander2D::Reset(Rng& rng) {
  EnvState s;
  const double x = rng.Uniform(-2.0, 2.0);
  const double y = rng.Uniform(3.0, 5.0);
  const double th = rng.Uniform(-0.1, 0.1);
  const double vx = rng.Uniform(-0.5, 0.5);
  const double vy = rng.Uniform(-0.5, 0.0);
  s.q = {x, y, th};
  s.q_dot = {vx, vy, 0.0};
  s.aux = {0.0, 0.0, 0.0};
  return s;
}

StepResult Lander2D::Step(const EnvState& s, std::span<const double> action) {
  if (action.size() != 2) throw ModelError("Lander2D: action must have 2 components");
  std::vector<double> a(action.begin(), action.end());
  StepResult out;
  out.clipped = ClipAction(a);
  const auto& o = opt_;
  const double th = s.q[2];
  const double thrust = 0.5 * (a[0] + 1.0) * o.max_thrust;
  double fx = -thrust * std::sin(th);
  double fy = thrust * std::cos(th) - o.mass * o.gravity;
  double tau = a[1] * o.max_torque;
  bool contact[2] = {false, false};
  for (int i = 0; i < 2; ++i) {
    const int side = i == 0 ? -1 : 1;
    const Foot f = FootOf(o, s, side);
    if (f.height >= 0.0) continue;
    contact[i] = true;
    const double n = std::max(0.0, -o.leg_stiffness * f.height - o.leg_damping * f.vy);
    const double t = std::clamp(-o.ground_friction * f.vx, -o.mu * n, o.mu * n);
    fx += t;
    fy += n;
    tau += f.rx * n - f.ry * t;
  }
  EnvState& nx = out.next;
  nx.q_dot = {s.q_dot[0] + fx / o.mass * o.dt, s.q_dot[1] + fy / o.mass * o.dt,
              s.q_dot[2] + tau / o.inertia * o.dt};
  nx.q = {s.q[0] + nx.q_dot[0] * o.dt, s.q[1] + nx.q_dot[1] * o.dt,
          WrapAngle(s.q[2] + nx.q_dot[2] * o.dt)};
  nx.t = s.t + 1;
  const bool was_contact = s.aux[0] != 0.0 || s.aux[1] != 0.0;
  const bool cl = FootHeight(nx, -1) < 0.0;
  const bool cr = FootHeight(nx, 1) < 0.0;
  nx.aux = {cl ? 1.0 : 0.0, cr ? 1.0 : 0.0, 0.0};
  CheckState(nx, "Lander2D::Step");
  out.contact = contact[0] || contact[1] || cl || cr;

  const double dist = std::hypot(s.q[0], s.q[1]);
  out.reward = -o.dt * (dist + 0.5 * std::abs(s.q[2]));
  const double speed = std::hypot(nx.q_dot[0], nx.q_dot[1]);
  const bool touching = cl || cr;
  if (std::abs(nx.q[2]) > o.crash_tilt || std::abs(nx.q[0]) > o.x_limit ||
      nx.q[1] > o.y_limit || (touching && !was_contact && speed > o.crash_speed)) {
    out.reward -= 5.0;
    out.terminal = true;
  } else if (cl && cr && speed < 0.3 && std::abs(nx.q_dot[2]) < 0.3) {
    nx.aux[2] = s.aux[2] + 1.0;
    if (nx.aux[2] >= o.settle_steps) {
      out.reward += 5.0 - std::min(std::abs(nx.q[0]), 5.0);
      out.terminal = true;
    }
  }
  out.truncated = !out.terminal && nx.t >= o.max_steps;
  return out;
}

std::vector<double> Lander2D::Observe(const EnvState& s) const {
  return {s.q[0] / 5.0, s.q[1] / 5.0, s.q_dot[0] / 2.0, s.q_dot[1] / 2.0,
          s.q[2], s.q_dot[2], s.aux[0], s.aux[1]};
}

double Lander2D::TaskPotential(const EnvState& s) const {
  return -(std::hypot(s.q[0], s.q[1]) + 0.5 * std::abs(s.q[2]));
}

double Lander2D::EnergyRate(const EnvState& s, std::span<const double> action) const {
  const double a0 = std::clamp(action[0], -1.0, 1.0);
  const double a1 = std::clamp(action[1], -1.0, 1.0);
  const double thrust = 0.5 * (a0 + 1.0) * opt_.max_thrust;
  const double th = s.q[2];
  // gravity and the leg springs are inside E; only the engines do work
  return thrust * (-std::sin(th) * s.q_dot[0] + std::cos(th) * s.q_dot[1]) +
         a1 * opt_.max_torque * s.q_dot[2];
}

}  // namespace hears
