#ifndef HEARS_ENVS_ENV_H_
#define HEARS_ENVS_ENV_H_

#include <span>
#include <string>
#include <vector>

#include "hears/energy.h"
#include "hears/rng.h"
#include "hears/types.h"

namespace hears {

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool terminal = false;   // absorbing; no bootstrap
  bool truncated = false;  // time limit reached
  bool clipped = false;    // the action was clipped into bounds
  bool contact = false;    // a contact event happened inside the step
};

// Continuous-state environment. An instance is single-owner. Step is a
// deterministic function of (state, action) and the construction options.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string name() const = 0;
  virtual int action_dim() const = 0;
  virtual int obs_dim() const = 0;
  virtual double dt() const = 0;
  virtual int max_steps() const = 0;

  virtual EnvState Reset(Rng& rng) = 0;
  virtual StepResult Step(const EnvState& s, std::span<const double> action) = 0;
  virtual std::vector<double> Observe(const EnvState& s) const = 0;

  // task potential without the alpha_task weight
  virtual double TaskPotential(const EnvState& s) const = 0;
  virtual const EnergyModel& energy() const = 0;
  // dE/dt at (s, a) for the smooth part of the dynamics
  virtual double EnergyRate(const EnvState& s, std::span<const double> action) const = 0;

  // 0.5 sum a^2
  virtual double ActionEnergy(std::span<const double> action) const;
  // state-aware variant for penalties on action changes
  virtual double ActionEnergy(const EnvState& s, std::span<const double> action) const {
    (void)s;
    return ActionEnergy(action);
  }

  // rough per-step reward magnitude, used for the lambda ceiling
  virtual double RewardScale() const { return 1.0; }

  double EnergyPotential(const EnvState& s) const {
    return hears::EnergyPotential(energy(), s);
  }
};

// Clips every component into [lo, hi]. Returns true if anything changed.
// Clipping an already clipped vector changes nothing.
bool ClipAction(std::vector<double>& action, double lo = -1.0, double hi = 1.0);

// Throws SimulationError with a state dump if any component is not finite.
void CheckState(const EnvState& s, const std::string& where);

// (-pi, pi]
double WrapAngle(double a);

}  // namespace hears

#endif  // HEARS_ENVS_ENV_H_
