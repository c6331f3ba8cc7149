#ifndef HEARS_ENVS_PENDULUM_H_
#define HEARS_ENVS_PENDULUM_H_

#include "hears/envs/env.h"

namespace hears {

struct PendulumOptions {
  double mass = 1.0;
  double length = 1.0;
  double gravity = 9.81;
  double damping = 0.0;     // viscous, N m s
  double max_torque = 2.0;  // N m at |a| = 1
  double dt = 0.02;
  int max_steps = 250;
  bool random_start = true;  // uniform angle, else hanging at rest
};

// Point-mass pendulum. q = (theta), q_dot = (omega); theta = 0 hangs down and
// theta = pi is upright. One action a in [-1, 1] scaled to max_torque.
// Integrated with the 4th-order Yoshida composition of Stormer-Verlet.
class Pendulum : public Env {
 public:
  explicit Pendulum(PendulumOptions options = {});

  std::string name() const override { return "pendulum"; }
  int action_dim() const override { return 1; }
  int obs_dim() const override { return 3; }
  double dt() const override { return opt_.dt; }
  int max_steps() const override { return opt_.max_steps; }

  EnvState Reset(Rng& rng) override;
  StepResult Step(const EnvState& s, std::span<const double> action) override;
  std::vector<double> Observe(const EnvState& s) const override;

  // -(1 - cos(phi)) with phi the angle from upright
  double TaskPotential(const EnvState& s) const override;
  const EnergyModel& energy() const override { return energy_; }
  double EnergyRate(const EnvState& s, std::span<const double> action) const override;
  double RewardScale() const override { return 10.0; }

  const PendulumOptions& options() const { return opt_; }

  // one integrator step of length h under a constant torque
  void Integrate(double& theta, double& omega, double torque, double h) const;

 private:
  PendulumOptions opt_;
  EnergyModel energy_;
};

EnergyModel PendulumEnergyModel(const PendulumOptions& o);

}  // namespace hears

#endif  // HEARS_ENVS_PENDULUM_H_
