#ifndef HEARS_ENVS_LANDER_H_
#define HEARS_ENVS_LANDER_H_

#include "hears/envs/env.h"

namespace hears {

struct LanderOptions {
  double mass = 1.0;
  double inertia = 0.2;
  double gravity = 9.81;
  double leg_half_span = 0.5;  // lateral foot offset from the centre line
  double leg_drop = 0.4;       // vertical foot offset below the centre of mass
  double leg_stiffness = 400.0;  // per leg, N/m
  double leg_damping = 20.0;
  double ground_friction = 10.0;  // tangential damping, capped by mu N
  double mu = 1.0;
  double max_thrust = 2.0 * 9.81;  // main engine at a0 = 1; a0 = 0 hovers
  double max_torque = 1.0;        // side engines at |a1| = 1
  double dt = 0.02;
  int max_steps = 400;
  double crash_speed = 3.0;
  double crash_tilt = 1.0;  // rad
  double x_limit = 10.0;
  double y_limit = 15.0;
  int settle_steps = 25;
};

// Planar lander. q = (x, y, theta), q_dot = (v_x, v_y, omega),
// aux = (left contact, right contact, settled step count). y is the height
// of the feet above the pad when level, so x = y = theta = 0 is touchdown on
// the pad centre. Actions: a0 main engine (throttle (a0 + 1) / 2), a1 side
// torque. The observation is the 8-vector (x, y, v_x, v_y, theta, omega,
// contact_l, contact_r). Semi-implicit Euler.
class Lander2D : public Env {
 public:
  explicit Lander2D(LanderOptions options = {});

  std::string name() const override { return "lander"; }
  int action_dim() const override { return 2; }
  int obs_dim() const override { return 8; }
  double dt() const override { return opt_.dt; }
  int max_steps() const override { return opt_.max_steps; }

  EnvState Reset(Rng& rng) override;
  StepResult Step(const EnvState& s, std::span<const double> action) override;
  std::vector<double> Observe(const EnvState& s) const override;

  // -(sqrt(x^2 + y^2) + 0.5 |theta|)
  double TaskPotential(const EnvState& s) const override;
  const EnergyModel& energy() const override { return energy_; }
  double EnergyRate(const EnvState& s, std::span<const double> action) const override;
  double RewardScale() const override { return 0.5; }

  const LanderOptions& options() const { return opt_; }
  // feet height above ground for the side s = -1 (left), +1 (right)
  double FootHeight(const EnvState& st, int side) const;
  // static resting height on level ground (negative: springs compressed)
  double RestHeight() const;

 private:
  LanderOptions opt_;
  EnergyModel energy_;
};

EnergyModel LanderEnergyModel(const LanderOptions& o);

}  // namespace hears

#endif  // HEARS_ENVS_LANDER_H_
