#include "hears/energy.h"

#include <algorithm>
#include <bit>
#include <cmath>

namespace hears {

namespace {

void CheckFinite(const EnvState& s) {
  for (double v : s.q) {
    if (!std::isfinite(v)) throw ModelError("energy: non-finite coordinate");
  }
  for (double v : s.q_dot) {
    if (!std::isfinite(v)) throw ModelError("energy: non-finite velocity");
  }
}

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int Sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

EnergyModel::EnergyModel(std::string name, std::vector<EnergyTerm> terms,
                         double normalizer, double phi_max)
    : name_(std::move(name)),
      terms_(std::move(terms)),
      normalizer_(normalizer),
      phi_max_(phi_max) {
  if (!(normalizer_ > 0.0)) throw ModelError("EnergyModel: normalizer must be positive");
  if (!(phi_max_ > 0.0)) throw ModelError("EnergyModel: phi_max must be positive");
  for (const auto& t : terms_) {
    if (!t.value) throw ModelError("EnergyModel: term '" + t.name + "' has no value");
  }
}

bool EnergyModel::HasTerm(const std::string& term) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const EnergyTerm& t) { return t.name == term; });
}

double EnergyModel::Kinetic(const EnvState& s) const {
  double e = 0.0;
  for (const auto& t : terms_) {
    if (t.kind == EnergyKind::kKinetic) e += t.value(s);
  }
  return e;
}

double EnergyModel::PotentialEnergy(const EnvState& s) const {
  double e = 0.0;
  for (const auto& t : terms_) {
    if (t.kind != EnergyKind::kKinetic) e += t.value(s);
  }
  return e;
}

double EnergyModel::Noise(const EnvState& s) const {
  if (noise_delta_ == 0.0) return 0.0;
  uint64_t h = SplitMix(noise_seed_);
  for (double v : s.q) h = SplitMix(h ^ std::bit_cast<uint64_t>(v));
  for (double v : s.q_dot) h = SplitMix(h ^ std::bit_cast<uint64_t>(v));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return noise_delta_ * (2.0 * u - 1.0);
}

double EnergyModel::Total(const EnvState& s) const {
  double e = 0.0;
  for (const auto& t : terms_) e += t.value(s);
  // noise lives in potential units, i.e. after division by the normalizer
  return e + Noise(s) * normalizer_;
}

std::vector<double> EnergyModel::PotentialGradient(const EnvState& s) const {
  std::vector<double> g(s.q.size(), 0.0);
  for (const auto& t : terms_) {
    if (t.kind == EnergyKind::kKinetic) continue;
    if (!t.grad_q) throw ModelError("EnergyModel: term '" + t.name + "' has no gradient");
    const auto gt = t.grad_q(s);
    if (gt.size() != g.size()) throw ModelError("EnergyModel: gradient size mismatch");
    for (size_t i = 0; i < g.size(); ++i) g[i] += gt[i];
  }
  return g;
}

double TotalEnergy(const EnergyModel& model, const EnvState& s) {
  CheckFinite(s);
  const double e = model.Total(s);
  if (!std::isfinite(e)) throw ModelError("energy: non-finite total energy");
  return e;
}

double EnergyPotential(const EnergyModel& model, const EnvState& s) {
  const double phi = -TotalEnergy(model, s) / model.normalizer();
  return std::clamp(phi, -model.phi_max(), model.phi_max());
}

ApproximateEnergy ApproximateModel(const EnergyModel& model,
                                   const std::vector<std::string>& omit,
                                   double noise_delta, uint64_t noise_seed,
                                   std::span<const EnvState> samples) {
  for (const auto& name : omit) {
    if (!model.HasTerm(name)) {
      throw ModelError("ApproximateModel: no term named '" + name + "'");
    }
  }
  if (!(noise_delta >= 0.0)) throw ModelError("ApproximateModel: noise must be >= 0");
  std::vector<EnergyTerm> kept;
  for (const auto& t : model.terms()) {
    if (std::find(omit.begin(), omit.end(), t.name) == omit.end()) kept.push_back(t);
  }
  if (kept.empty()) throw ModelError("ApproximateModel: cannot omit every term");
  ApproximateEnergy out;
  out.model = EnergyModel(model.name() + "-approx", std::move(kept), model.normalizer(),
                          model.phi_max());
  out.model.SetNoise(noise_delta, noise_seed);
  double sup_true = 0.0;
  for (const auto& s : samples) {
    const double a = EnergyPotential(model, s);
    const double b = EnergyPotential(out.model, s);
    out.epsilon_abs = std::max(out.epsilon_abs, std::abs(a - b));
    sup_true = std::max(sup_true, std::abs(a));
  }
  out.epsilon_rel = sup_true > 0.0 ? out.epsilon_abs / sup_true : 0.0;
  return out;
}

std::vector<std::vector<double>> EnergyHessianQ(const EnergyModel& model,
                                                const EnvState& s, double h) {
  const size_t n = s.q.size();
  std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
  auto eval = [&](size_t i, double di, size_t j, double dj) {
    EnvState p = s;
    p.q[i] += di;
    p.q[j] += dj;
    return TotalEnergy(model, p);
  };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      const double v = (eval(i, h, j, h) - eval(i, h, j, -h) - eval(i, -h, j, h) +
                        eval(i, -h, j, -h)) /
                       (4.0 * h * h);
      hess[i][j] = hess[j][i] = v;
    }
  }
  return hess;
}

std::vector<double> NumericPotentialGradient(const EnergyModel& model,
                                             const EnvState& s, double h) {
  std::vector<double> g(s.q.size());
  for (size_t i = 0; i < s.q.size(); ++i) {
    EnvState p = s;
    EnvState m = s;
    p.q[i] += h;
    m.q[i] -= h;
    g[i] = (model.PotentialEnergy(p) - model.PotentialEnergy(m)) / (2.0 * h);
  }
  return g;
}

VehicleEnergyTerms VehicleInternalEnergyTerms(double v_x, double v_y, double yaw_rate,
                                              double prev_yaw_rate,
                                              const VehicleEnergyParams& p) {
  if (!(p.v_target > 0.0 && p.r_typical > 0.0 && p.r_ref > 0.0 && p.v_ideal > 0.0)) {
    throw ModelError("vehicle energy: normalizers must be positive");
  }
  VehicleEnergyTerms e;
  // the mass cancels in m (v_x^2 + v_y^2) / (m v_target^2)
  e.lin = (v_x * v_x + v_y * v_y) / (p.v_target * p.v_target);
  e.ang = yaw_rate * yaw_rate / (p.r_typical * p.r_typical);
  const double beta = (v_x == 0.0 && v_y == 0.0) ? 0.0 : std::atan2(v_y, v_x);
  e.slip = p.slip_weight * beta * beta;
  const double dr = (yaw_rate - prev_yaw_rate) / p.r_ref;
  e.yaw_change = p.yaw_change_weight * dr * dr;
  const double dv = (v_x - p.v_ideal) / p.v_ideal;
  e.speed_dev = p.speed_dev_weight * dv * dv;
  return e;
}

std::vector<double> EnergyTrace::DeltaE() const {
  std::vector<double> d;
  for (size_t t = 1; t < energy.size(); ++t) d.push_back(energy[t] - energy[t - 1]);
  return d;
}

std::vector<double> EnergyTrace::DeltaPhi() const {
  std::vector<double> d;
  for (size_t t = 1; t < energy.size(); ++t) d.push_back(-(energy[t] - energy[t - 1]));
  return d;
}

LyapunovReport LyapunovHeuristicCheck(const EnergyTrace& trace, double dt) {
  if (trace.energy.size() < 2) throw ModelError("LyapunovHeuristicCheck: trace too short");
  if (!(dt > 0.0)) throw ModelError("LyapunovHeuristicCheck: dt must be positive");
  const size_t steps = trace.energy.size() - 1;
  const bool have_rate = trace.energy_rate_dt.size() >= steps;
  LyapunovReport rep;
  rep.steps = static_cast<int>(steps);
  const auto de = trace.DeltaE();
  const auto dphi = trace.DeltaPhi();
  int consistent = 0;
  for (size_t t = 0; t < steps; ++t) {
    if (Sign(dphi[t]) == -Sign(de[t])) ++consistent;
    const bool contact = t < trace.contact.size() && trace.contact[t];
    if (contact) {
      ++rep.excluded_contact_steps;
      continue;
    }
    if (have_rate) {
      rep.discretization_residual =
          std::max(rep.discretization_residual, std::abs(de[t] - trace.energy_rate_dt[t]));
    }
  }
  rep.sign_consistency = static_cast<double>(consistent) / static_cast<double>(steps);
  if (trace.lyapunov.size() >= 2) {
    int moved = 0;
    int decreased = 0;
    for (size_t t = 1; t < trace.lyapunov.size(); ++t) {
      const double d = trace.lyapunov[t] - trace.lyapunov[t - 1];
      if (d == 0.0) continue;
      ++moved;
      if (d < 0.0) ++decreased;
    }
    if (moved > 0) rep.lyapunov_decrease_fraction = static_cast<double>(decreased) / moved;
  }
  return rep;
}

}  // namespace hears
