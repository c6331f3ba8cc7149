#ifndef HEARS_HARNESS_VERIFY_H_
#define HEARS_HARNESS_VERIFY_H_

#include <functional>
#include <string>
#include <vector>

#include "hears/envs/gridnav.h"
#include "hears/learner/actor_critic.h"
#include "hears/learner/tabular.h"

namespace hears {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0: no limit
};

struct CheckSpec {
  int id;
  std::string name;
  double limit_seconds;
  std::function<CheckResult()> run;
};

// The theorem and experiment suite in order. Each check records its own
// runtime and fails when it exceeds its limit.
std::vector<CheckSpec> AllChecks();

// Runs one check, catching exceptions (reported as failures) and timing it.
CheckResult RunCheck(const CheckSpec& spec);

// "PASS [3] name: detail" / "FAIL ..."
std::string FormatCheck(const CheckResult& r);

// individual checks
CheckResult CheckPolicyInvariance(int n_mdps = 200, int n_potentials = 50);
CheckResult CheckValueShift(int n_mdps = 200, int n_potentials = 50);
CheckResult CheckRewardBound(int samples = 100000);
CheckResult CheckEnvelopeDerivative(int n_mdps = 50);
CheckResult CheckApproxPotentialReport();
CheckResult CheckEnergyConservation();
CheckResult CheckGradients(int n_nets = 20);
CheckResult CheckShapingOffIdentity();
CheckResult CheckLyapunovResidual();
CheckResult CheckAblationGrid();

// experiment designs

struct GridNavStudy {
  GridNavOptions grid;
  ShapingSetup shaping;
  QLearningConfig q;
  std::vector<uint64_t> seeds;
  double max_ratio = 0.8;
};
GridNavStudy DefaultGridNavStudy();
CheckResult CheckGridNavAcceleration(const GridNavStudy& study);

struct OscillationStudy {
  int probe_steps = 200;
  double probe_ratio = 100.0;
  AcConfig ac;
  ShapingSetup regularized;    // lambda > 0
  ShapingSetup unregularized;  // same potentials, lambda = 0
  std::vector<uint64_t> seeds;
  double return_tolerance = 0.05;
  int eval_starts = 5;         // deterministic evaluation episodes per seed
};
OscillationStudy DefaultOscillationStudy();
CheckResult CheckOscillationSuppression(const OscillationStudy& study);

struct VehicleStudy {
  AcConfig ac;
  ShapingSetup hears;
  std::vector<uint64_t> seeds;
  int train_max_steps = 0;  // per-episode cap on the training road
};
VehicleStudy DefaultVehicleStudy();
CheckResult CheckVehicleAnalog(const VehicleStudy& study);

// Vehicle evaluation metrics on the 300 m test road for a trained agent.
struct VehicleEvaluation {
  double max_abs_beta = 0.0;      // rad
  double speed_error_cv = 0.0;    // percent, over the cruise phase
  bool reached_cruise = false;
  bool finished = false;          // reached the end of the road
  int steps = 0;
  int bound_violations = 0;
  double min_feasibility = 1.0;
  double mean_feasibility = 0.0;
};
VehicleEvaluation EvaluateVehicle(const ActorCritic& agent);

}  // namespace hears

#endif  // HEARS_HARNESS_VERIFY_H_
