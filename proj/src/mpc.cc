#include "hears/mpc.h"

#include <algorithm>
#include <cmath>

#include "hears/types.h"

namespace hears {

namespace {

bool Psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff() >= -1e-10;
}

// everything the solver needs in normalized coordinates z = u / scale
struct Qp {
  Eigen::MatrixXd h;  // hessian of the cost in z
  Eigen::VectorXd g;  // gradient of the cost at z = 0
  double c = 0.0;     // cost at z = 0
  Eigen::VectorXd lo, hi;  // box, with u_0 tightened by the rate bound
  Eigen::VectorXd rate;    // per input, normalized
  int nu = 0, nc = 0;
};

Eigen::VectorXd Stack(const Eigen::MatrixXd& m) {
  // row-major stacking: element (k, i) -> k * cols + i
  Eigen::VectorXd v(m.size());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    for (Eigen::Index i = 0; i < m.cols(); ++i) v[k * m.cols() + i] = m(k, i);
  }
  return v;
}

Eigen::MatrixXd Unstack(const Eigen::VectorXd& v, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int k = 0; k < rows; ++k) {
    for (int i = 0; i < cols; ++i) m(k, i) = v[k * cols + i];
  }
  return m;
}

Qp BuildQp(const MpcProblem& p, const Condensed& cd, const Eigen::VectorXd& x0,
           const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& u_prev,
           const Eigen::VectorXd& scale) {
  const int nu = p.nu(), nc = p.n_control, ny = p.ny(), np = p.n_predict;
  const int n = nu * nc;
  Eigen::MatrixXd qbar = Eigen::MatrixXd::Zero(ny * np, ny * np);
  for (int k = 0; k < np; ++k) qbar.block(k * ny, k * ny, ny, ny) = p.q;
  Eigen::MatrixXd rbar = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < nc; ++k) rbar.block(k * nu, k * nu, nu, nu) = p.r;
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < nc; ++k) d.block(k * nu, (k - 1) * nu, nu, nu) = -Eigen::MatrixXd::Identity(nu, nu);
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(n);
  d0.head(nu) = u_prev;
  const Eigen::VectorXd e0 = cd.f * x0 - Stack(y_ref.topRows(np));
  const Eigen::MatrixXd s = scale.replicate(nc, 1).asDiagonal();
  const Eigen::MatrixXd gs = cd.g * s;
  const Eigen::MatrixXd ds = d * s;
  Qp qp;
  qp.nu = nu;
  qp.nc = nc;
  qp.h = 2.0 * (gs.transpose() * qbar * gs + ds.transpose() * rbar * ds);
  qp.g = 2.0 * (gs.transpose() * qbar * e0 - ds.transpose() * rbar * d0);
  qp.c = e0.dot(qbar * e0) + d0.dot(rbar * d0);
  qp.lo.resize(n);
  qp.hi.resize(n);
  for (int k = 0; k < nc; ++k) {
    for (int i = 0; i < nu; ++i) {
      double lo = p.u_min[i], hi = p.u_max[i];
      if (k == 0) {
        lo = std::max(lo, u_prev[i] - p.du_max[i]);
        hi = std::min(hi, u_prev[i] + p.du_max[i]);
      }
      qp.lo[k * nu + i] = lo / scale[i];
      qp.hi[k * nu + i] = hi / scale[i];
    }
  }
  qp.rate = p.du_max.cwiseQuotient(scale);
  return qp;
}

double Cost(const Qp& qp, const Eigen::VectorXd& z) {
  return 0.5 * z.dot(qp.h * z) + qp.g.dot(z) + qp.c;
}

// projection onto the slab |z_{k+1} - z_k| <= rate for pairs starting at
// k = first, first + 2, ...
void ProjectPairs(const Qp& qp, int first, Eigen::VectorXd& z) {
  for (int k = first; k + 1 < qp.nc; k += 2) {
    for (int i = 0; i < qp.nu; ++i) {
      double& a = z[k * qp.nu + i];
      double& b = z[(k + 1) * qp.nu + i];
      const double diff = b - a;
      const double rho = qp.rate[i];
      if (std::abs(diff) <= rho) continue;
      const double excess = 0.5 * (std::abs(diff) - rho) * (diff > 0 ? 1.0 : -1.0);
      b -= excess;
      a += excess;
    }
  }
}

// Dykstra's alternating projection over box, even pairs and odd pairs,
// followed by a sequential clamp that makes the result strictly feasible.
Eigen::VectorXd Project(const Qp& qp, const Eigen::VectorXd& v) {
  Eigen::VectorXd x = v;
  Eigen::VectorXd p1 = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd p2 = p1, p3 = p1;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd prev = x;
    Eigen::VectorXd y = (x + p1).cwiseMax(qp.lo).cwiseMin(qp.hi);
    p1 = x + p1 - y;
    x = y;
    y = x + p2;
    ProjectPairs(qp, 0, y);
    p2 = x + p2 - y;
    x = y;
    y = x + p3;
    ProjectPairs(qp, 1, y);
    p3 = x + p3 - y;
    x = y;
    if ((x - prev).cwiseAbs().maxCoeff() < 1e-14) break;
  }
  for (int k = 0; k < qp.nc; ++k) {
    for (int i = 0; i < qp.nu; ++i) {
      const int j = k * qp.nu + i;
      double lo = qp.lo[j], hi = qp.hi[j];
      if (k > 0) {
        const double prev = x[j - qp.nu];
        lo = std::max(lo, prev - qp.rate[i]);
        hi = std::min(hi, prev + qp.rate[i]);
      }
      x[j] = std::clamp(x[j], lo, hi);
    }
  }
  return x;
}

double LargestEigenvalue(const Eigen::MatrixXd& h) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(h.rows());
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = h * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w) / v.squaredNorm();
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

void MpcProblem::Validate() const {
  if (n_control < 1 || n_predict < 1 || n_control > n_predict) {
    throw ModelError("MpcProblem: need 1 <= N_c <= N_p");
  }
  if (model.a.rows() != model.a.cols() || model.b.rows() != model.a.rows() ||
      model.c.cols() != model.a.rows()) {
    throw ModelError("MpcProblem: model matrices have inconsistent shapes");
  }
  if (q.rows() != ny() || r.rows() != nu() || !Psd(q) || !Psd(r)) {
    throw ModelError("MpcProblem: weights must be PSD with matching shapes");
  }
  if (u_min.size() != nu() || u_max.size() != nu() || du_max.size() != nu()) {
    throw ModelError("MpcProblem: bounds have wrong size");
  }
  for (int i = 0; i < nu(); ++i) {
    if (!(u_min[i] < u_max[i])) throw ModelError("MpcProblem: u_min must be below u_max");
    if (!(du_max[i] > 0.0)) throw ModelError("MpcProblem: du_max must be positive");
  }
  if ((y_abs_max.size() != 0 && y_abs_max.size() != ny()) ||
      (y_track_tol.size() != 0 && y_track_tol.size() != ny())) {
    throw ModelError("MpcProblem: output constraints have wrong size");
  }
}

Condensed Condense(const MpcProblem& p) {
  const int nx = p.nx(), nu = p.nu(), ny = p.ny(), np = p.n_predict, nc = p.n_control;
  Condensed cd;
  cd.f = Eigen::MatrixXd::Zero(ny * np, nx);
  cd.g = Eigen::MatrixXd::Zero(ny * np, nu * nc);
  // x_k = A^k x0 + sum_{j<k} A^{k-1-j} B u_{min(j, Nc-1)}
  Eigen::MatrixXd ak = Eigen::MatrixXd::Identity(nx, nx);
  std::vector<Eigen::MatrixXd> powers{ak};
  for (int k = 1; k <= np; ++k) {
    ak = p.model.a * ak;
    powers.push_back(ak);
  }
  for (int k = 1; k <= np; ++k) {
    cd.f.block((k - 1) * ny, 0, ny, nx) = p.model.c * powers[k];
    for (int j = 0; j < k; ++j) {
      const int col = std::min(j, nc - 1);
      cd.g.block((k - 1) * ny, col * nu, ny, nu) += p.model.c * powers[k - 1 - j] * p.model.b;
    }
  }
  return cd;
}

Eigen::MatrixXd PredictOutputs(const MpcProblem& p, const Eigen::VectorXd& x0,
                               const Eigen::MatrixXd& u_seq) {
  Eigen::MatrixXd y(p.n_predict, p.ny());
  Eigen::VectorXd x = x0;
  for (int k = 0; k < p.n_predict; ++k) {
    const Eigen::VectorXd u = u_seq.row(std::min(k, p.n_control - 1)).transpose();
    x = p.model.a * x + p.model.b * u;
    y.row(k) = (p.model.c * x).transpose();
  }
  return y;
}

double MpcCost(const MpcProblem& p, const Eigen::VectorXd& x0, const Eigen::MatrixXd& y_ref,
               const Eigen::VectorXd& u_prev, const Eigen::MatrixXd& u_seq) {
  const Eigen::MatrixXd y = PredictOutputs(p, x0, u_seq);
  double cost = 0.0;
  for (int k = 0; k < p.n_predict; ++k) {
    const Eigen::VectorXd e = (y.row(k) - y_ref.row(k)).transpose();
    cost += e.dot(p.q * e);
  }
  Eigen::VectorXd prev = u_prev;
  for (int k = 0; k < p.n_control; ++k) {
    const Eigen::VectorXd du = u_seq.row(k).transpose() - prev;
    cost += du.dot(p.r * du);
    prev = u_seq.row(k).transpose();
  }
  return cost;
}

double FeasibilityRatio(const MpcProblem& p, const Eigen::MatrixXd& predicted,
                        const Eigen::MatrixXd& y_ref) {
  int ok = 0;
  for (int k = 0; k < p.n_predict; ++k) {
    bool good = true;
    for (int i = 0; i < p.ny(); ++i) {
      const double y = predicted(k, i);
      if (p.y_abs_max.size() && std::abs(y) > p.y_abs_max[i]) good = false;
      if (p.y_track_tol.size() && std::abs(y - y_ref(k, i)) > p.y_track_tol[i]) good = false;
    }
    ok += good;
  }
  return static_cast<double>(ok) / p.n_predict;
}

bool InputsFeasible(const MpcProblem& p, const Eigen::VectorXd& u_prev,
                    const Eigen::MatrixXd& u_seq, double tol) {
  Eigen::VectorXd prev = u_prev;
  for (int k = 0; k < u_seq.rows(); ++k) {
    for (int i = 0; i < p.nu(); ++i) {
      const double u = u_seq(k, i);
      if (u < p.u_min[i] - tol || u > p.u_max[i] + tol) return false;
      if (std::abs(u - prev[i]) > p.du_max[i] + tol) return false;
    }
    prev = u_seq.row(k).transpose();
  }
  return true;
}

MpcReport SolveMpc(const MpcProblem& p, const Eigen::VectorXd& x0,
                   const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& u_prev,
                   const Eigen::MatrixXd& warm_start) {
  p.Validate();
  if (x0.size() != p.nx()) throw ModelError("SolveMpc: x0 has wrong size");
  if (y_ref.rows() < p.n_predict || y_ref.cols() != p.ny()) {
    throw ModelError("SolveMpc: reference needs N_p rows of ny outputs");
  }
  if (u_prev.size() != p.nu()) throw ModelError("SolveMpc: u_prev has wrong size");
  for (int i = 0; i < p.nu(); ++i) {
    if (u_prev[i] < p.u_min[i] || u_prev[i] > p.u_max[i]) {
      throw ModelError("SolveMpc: u_prev outside the input box");
    }
  }
  const int nu = p.nu(), nc = p.n_control;
  const Eigen::VectorXd scale =
      (0.5 * (p.u_max - p.u_min)).cwiseMax(Eigen::VectorXd::Constant(nu, 1e-12));
  const Condensed cd = Condense(p);
  const Qp qp = BuildQp(p, cd, x0, y_ref, u_prev, scale);

  Eigen::VectorXd z(nu * nc);
  if (warm_start.rows() == nc && warm_start.cols() == nu) {
    z = Stack(warm_start);
  } else {
    for (int k = 0; k < nc; ++k) z.segment(k * nu, nu) = u_prev;
  }
  for (int k = 0; k < nc; ++k) z.segment(k * nu, nu) = z.segment(k * nu, nu).cwiseQuotient(scale);
  z = Project(qp, z);

  double lip = LargestEigenvalue(qp.h) * 1.01;
  if (!(lip > 0.0)) lip = 1.0;
  MpcReport rep;
  double cost = Cost(qp, z);
  rep.cost_history.push_back(cost);
  for (int it = 1; it <= p.max_iters; ++it) {
    const Eigen::VectorXd grad = qp.h * z + qp.g;
    const Eigen::VectorXd next = Project(qp, z - grad / lip);
    rep.residual = (next - z).cwiseAbs().maxCoeff();
    rep.iterations = it;
    if (rep.residual <= p.tol) {
      rep.converged = true;
      const double c = Cost(qp, next);
      if (c <= cost) {
        z = next;
        cost = c;
        rep.cost_history.push_back(cost);
      }
      break;
    }
    const double c = Cost(qp, next);
    // an inexact projection may break descent; keep the best iterate
    if (c > cost + 1e-12 * (1.0 + std::abs(cost))) break;
    z = next;
    cost = c;
    rep.cost_history.push_back(cost);
  }
  Eigen::MatrixXd u = Unstack(z, nc, nu);
  for (int k = 0; k < nc; ++k) {
    for (int i = 0; i < nu; ++i) u(k, i) *= scale[i];
  }
  // guard against rounding in the rescale
  for (int k = 0; k < nc; ++k) {
    for (int i = 0; i < nu; ++i) {
      double lo = p.u_min[i], hi = p.u_max[i];
      const double prev = k == 0 ? u_prev[i] : u(k - 1, i);
      lo = std::max(lo, prev - p.du_max[i]);
      hi = std::min(hi, prev + p.du_max[i]);
      u(k, i) = std::clamp(u(k, i), lo, hi);
    }
  }
  rep.u_sequence = u;
  rep.u0 = u.row(0).transpose();
  rep.predicted = PredictOutputs(p, x0, u);
  rep.cost = MpcCost(p, x0, y_ref, u_prev, u);
  rep.feasibility_ratio = FeasibilityRatio(p, rep.predicted, y_ref);
  return rep;
}

MpcReport MpcController::Solve(const MpcProblem& p, const Eigen::VectorXd& x0,
                               const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& u_prev) {
  Eigen::MatrixXd warm;
  if (warm_.rows() == p.n_control && warm_.cols() == p.nu()) {
    // shift the previous plan by one step
    warm = warm_;
    for (int k = 0; k + 1 < p.n_control; ++k) warm.row(k) = warm_.row(k + 1);
  }
  MpcReport rep = SolveMpc(p, x0, y_ref, u_prev, warm);
  warm_ = rep.u_sequence;
  return rep;
}

}  // namespace hears
