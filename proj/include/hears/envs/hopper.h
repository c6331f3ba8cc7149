#ifndef HEARS_ENVS_HOPPER_H_
#define HEARS_ENVS_HOPPER_H_

#include "hears/envs/env.h"

namespace hears {

struct HopperOptions {
  double mass = 1.0;
  double inertia = 0.1;
  double gravity = 9.81;
  double leg_length = 1.0;   // spring rest length
  double stiffness = 200.0;  // N/m
  double max_thrust = 20.0;  // axial leg thrust in stance at |a0| = 1
  double max_push = 5.0;     // horizontal push in stance at |a1| = 1
  double max_torque = 2.0;   // pitch torque at |a2| = 1
  double topple = 0.5;       // gravity lever arm for pitch in stance, m
  double posture_weight = 0.1;
  double dt = 0.02;
  int max_steps = 500;
  double fall_pitch = 0.8;
};

// Vertical spring-mass hopper with forward motion and a pitching body.
// q = (z, x, pitch), q_dot = (v_z, v_x, pitch_rate), aux = (stance flag).
// The foot touches the ground while z < leg_length. Actions: a0 axial leg
// thrust and a1 horizontal push (both stance only), a2 pitch torque.
// Semi-implicit Euler.
class HopperLite : public Env {
 public:
  explicit HopperLite(HopperOptions options = {});

  std::string name() const override { return "hopper"; }
  int action_dim() const override { return 3; }
  int obs_dim() const override { return 7; }
  double dt() const override { return opt_.dt; }
  int max_steps() const override { return opt_.max_steps; }

  EnvState Reset(Rng& rng) override;
  StepResult Step(const EnvState& s, std::span<const double> action) override;
  std::vector<double> Observe(const EnvState& s) const override;

  // sqrt(max(0, x))
  double TaskPotential(const EnvState& s) const override;
  const EnergyModel& energy() const override { return energy_; }
  double EnergyRate(const EnvState& s, std::span<const double> action) const override;

  const HopperOptions& options() const { return opt_; }
  // standing equilibrium height
  double RestHeight() const;
  EnvState Standing() const;

 private:
  HopperOptions opt_;
  EnergyModel energy_;
};

EnergyModel HopperEnergyModel(const HopperOptions& o);

}  // namespace hears

#endif  // HEARS_ENVS_HOPPER_H_
