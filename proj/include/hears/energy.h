#ifndef HEARS_ENERGY_H_
#define HEARS_ENERGY_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hears/types.h"

namespace hears {

enum class EnergyKind {
  kKinetic,    // quadratic in velocities
  kPotential,  // function of configuration only
  kPseudo,     // shaping term that is not mechanical energy
};

struct EnergyTerm {
  std::string name;
  EnergyKind kind = EnergyKind::kKinetic;
  std::function<double(const EnvState&)> value;
  // closed-form gradient with respect to q; only used for potential terms
  std::function<std::vector<double>(const EnvState&)> grad_q;
};

// Mechanical energy E = T + U as a sum of named terms. The energy potential
// is -E / normalizer, clipped to [-phi_max, phi_max].
class EnergyModel {
 public:
  EnergyModel() = default;
  EnergyModel(std::string name, std::vector<EnergyTerm> terms, double normalizer,
              double phi_max = std::numeric_limits<double>::infinity());

  const std::string& name() const { return name_; }
  const std::vector<EnergyTerm>& terms() const { return terms_; }
  double normalizer() const { return normalizer_; }
  double phi_max() const { return phi_max_; }
  bool HasTerm(const std::string& term) const;

  double Kinetic(const EnvState& s) const;
  double PotentialEnergy(const EnvState& s) const;  // includes pseudo terms
  // T + U (+ injected noise for approximate models), in model units
  double Total(const EnvState& s) const;
  // sum of closed-form grad_q over potential terms
  std::vector<double> PotentialGradient(const EnvState& s) const;

  // injected, bounded, state-deterministic noise in normalized units
  void SetNoise(double delta, uint64_t seed) {
    noise_delta_ = delta;
    noise_seed_ = seed;
  }
  double noise_delta() const { return noise_delta_; }

 private:
  double Noise(const EnvState& s) const;

  std::string name_;
  std::vector<EnergyTerm> terms_;
  double normalizer_ = 1.0;
  double phi_max_ = std::numeric_limits<double>::infinity();
  double noise_delta_ = 0.0;
  uint64_t noise_seed_ = 0;
};

// T + U; throws ModelError on non-finite state components.
double TotalEnergy(const EnergyModel& model, const EnvState& s);

// clip(-TotalEnergy / normalizer, phi_max)
double EnergyPotential(const EnergyModel& model, const EnvState& s);

struct ApproximateEnergy {
  EnergyModel model;
  double epsilon_abs = 0.0;  // sup over samples of |Phi* - Phi_hat|
  double epsilon_rel = 0.0;  // epsilon_abs / sup |Phi*|
};

// Drops the named terms and injects noise bounded by noise_delta (normalized
// units). The sup gap between the potentials is measured on `samples`.
ApproximateEnergy ApproximateModel(const EnergyModel& model,
                                   const std::vector<std::string>& omit,
                                   double noise_delta, uint64_t noise_seed,
                                   std::span<const EnvState> samples);

// Finite-difference d^2 E / dq^2 (central differences with step h).
std::vector<std::vector<double>> EnergyHessianQ(const EnergyModel& model,
                                                const EnvState& s, double h = 1e-4);

// Finite-difference grad_q U.
std::vector<double> NumericPotentialGradient(const EnergyModel& model,
                                             const EnvState& s, double h = 1e-6);

// ---------------------------------------------------------------------------
// vehicle internal energy (dimensionless)

struct VehicleEnergyParams {
  double v_target = 15.0;   // m/s
  double r_typical = 0.2;   // rad/s
  double r_ref = 0.1;       // rad/s
  double v_ideal = 15.0;    // m/s
  double slip_weight = 2.0;
  double yaw_change_weight = 1.0;
  double speed_dev_weight = 0.5;
};

struct VehicleEnergyTerms {
  double lin = 0.0;
  double ang = 0.0;
  double slip = 0.0;
  double yaw_change = 0.0;
  double speed_dev = 0.0;
  double total() const { return lin + ang + slip + yaw_change + speed_dev; }
};

// E_lin + E_ang + E_slip + E_dr + E_dv for a vehicle with body velocities
// (v_x, v_y), yaw rate r and sideslip beta = atan2(v_y, v_x).
VehicleEnergyTerms VehicleInternalEnergyTerms(double v_x, double v_y, double yaw_rate,
                                              double prev_yaw_rate,
                                              const VehicleEnergyParams& p);

inline double VehicleInternalEnergy(double v_x, double v_y, double yaw_rate,
                                    double prev_yaw_rate, const VehicleEnergyParams& p) {
  return VehicleInternalEnergyTerms(v_x, v_y, yaw_rate, prev_yaw_rate, p).total();
}

// ---------------------------------------------------------------------------
// traces and the discrete energy-rate heuristic

struct EnergyTrace {
  std::vector<double> energy;      // E_t, t = 0..T
  std::vector<double> energy_rate_dt;  // dE/dt|_{s_t,a_t} * dt, t = 0..T-1
  std::vector<char> contact;       // step t crosses a contact event
  std::vector<double> lyapunov;    // optional L_t, t = 0..T

  std::vector<double> DeltaE() const;
  // -DeltaE; the negated difference of the same subtraction
  std::vector<double> DeltaPhi() const;

  void Push(double e) { energy.push_back(e); }
};

struct LyapunovReport {
  double discretization_residual = 0.0;  // max |dE - Edot dt| over smooth steps
  double sign_consistency = 0.0;         // fraction sign(dPhi) == -sign(dE)
  std::optional<double> lyapunov_decrease_fraction;  // unset if L never moves
  int steps = 0;
  int excluded_contact_steps = 0;
};

LyapunovReport LyapunovHeuristicCheck(const EnergyTrace& trace, double dt);

}  // namespace hears

#endif  // HEARS_ENERGY_H_
