#ifndef HEARS_TYPES_H_
#define HEARS_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hears {

// Generalized coordinates, velocities and auxiliary environment data. The
// layout of q/q_dot/aux is environment-specific and documented per env.
struct EnvState {
  std::vector<double> q;
  std::vector<double> q_dot;
  std::vector<double> aux;
  int64_t t = 0;

  bool operator==(const EnvState&) const = default;
};

// One step of experience as it flows through the actor-critic loop. The
// potentials and the action energy are cached at interaction time so the
// shaped reward can be recomputed from the stored tuple.
struct Transition {
  EnvState state;
  std::vector<double> action;
  double reward = 0.0;         // shaped reward used for learning
  double base_reward = 0.0;    // environment reward (logging only)
  EnvState next_state;
  bool terminal = false;
  double phi = 0.0;            // potential of state
  double phi_next = 0.0;       // potential of next_state
  double action_energy = 0.0;  // E(a) >= 0
};

// Thrown when an input violates a documented precondition.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative procedure fails to converge. Carries the last
// residual so callers can report it.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what + " (residual " + std::to_string(residual) +
                           " after " + std::to_string(iterations) +
                           " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Raised by simulators when a NaN or infinity shows up in the state.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hears

#endif  // HEARS_TYPES_H_
