#ifndef HEARS_MPC_H_
#define HEARS_MPC_H_

#include <vector>

#include <Eigen/Dense>

#include "hears/vehicle_model.h"

namespace hears {

// Finite-horizon output tracking problem
//   min sum_{k=1..Np} |y_k - y_ref,k|^2_Q + sum_{k=0..Nc-1} |du_k|^2_R
// over u_0..u_{Nc-1}; inputs after Nc are held at u_{Nc-1};
// du_0 = u_0 - u_prev. Inputs are box- and rate-constrained.
struct MpcProblem {
  LinearModel model;
  int n_predict = 10;
  int n_control = 5;
  Eigen::MatrixXd q;        // ny x ny, PSD
  Eigen::MatrixXd r;        // nu x nu, PSD
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  Eigen::VectorXd du_max;   // per-step rate bound
  // output constraints counted by the feasibility ratio: |y_i| <= y_abs_max_i
  // and |y_i - y_ref_i| <= y_track_tol_i (empty vectors disable them)
  Eigen::VectorXd y_abs_max;
  Eigen::VectorXd y_track_tol;
  int max_iters = 300;
  double tol = 1e-9;  // fixed-point residual in normalized input units

  int nx() const { return static_cast<int>(model.a.rows()); }
  int nu() const { return static_cast<int>(model.b.cols()); }
  int ny() const { return static_cast<int>(model.c.rows()); }
  // throws ModelError on inconsistent shapes, non-PSD weights or empty boxes
  void Validate() const;
};

struct MpcReport {
  Eigen::VectorXd u0;              // applied command
  Eigen::MatrixXd u_sequence;      // Nc x nu
  Eigen::MatrixXd predicted;       // Np x ny, outputs y_1..y_Np
  double feasibility_ratio = 0.0;
  int iterations = 0;
  bool converged = false;
  double cost = 0.0;
  double residual = 0.0;
  std::vector<double> cost_history;  // cost of every accepted iterate
};

// Condensed prediction Y = F x0 + G U (U stacked Nc x nu, Y stacked Np x ny).
struct Condensed {
  Eigen::MatrixXd f;
  Eigen::MatrixXd g;
};
Condensed Condense(const MpcProblem& p);

// Cost of an input sequence (Nc x nu) for given x0, references (Np x ny) and
// previous input.
double MpcCost(const MpcProblem& p, const Eigen::VectorXd& x0, const Eigen::MatrixXd& y_ref,
               const Eigen::VectorXd& u_prev, const Eigen::MatrixXd& u_seq);

// Predicted outputs y_1..y_Np (Np x ny) for an input sequence.
Eigen::MatrixXd PredictOutputs(const MpcProblem& p, const Eigen::VectorXd& x0,
                               const Eigen::MatrixXd& u_seq);

// Fraction of prediction steps satisfying every output constraint.
double FeasibilityRatio(const MpcProblem& p, const Eigen::MatrixXd& predicted,
                        const Eigen::MatrixXd& y_ref);

// true when u_seq respects the box and rate constraints within tol
bool InputsFeasible(const MpcProblem& p, const Eigen::VectorXd& u_prev,
                    const Eigen::MatrixXd& u_seq, double tol = 1e-9);

// Projected gradient on the condensed problem. y_ref needs at least Np rows;
// u_prev must lie in the input box. A non-empty warm start (Nc x nu) seeds
// the iterate. Non-convergence returns the best iterate with converged=false.
MpcReport SolveMpc(const MpcProblem& p, const Eigen::VectorXd& x0,
                   const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& u_prev,
                   const Eigen::MatrixXd& warm_start = {});

// Keeps the previous solution as the warm start of the next call.
class MpcController {
 public:
  MpcReport Solve(const MpcProblem& p, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& u_prev);
  void Reset() { warm_.resize(0, 0); }

 private:
  Eigen::MatrixXd warm_;
};

}  // namespace hears

#endif  // HEARS_MPC_H_
