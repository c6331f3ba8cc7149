#include "hears/envs/env.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hears {

double Env::ActionEnergy(std::span<const double> action) const {
  double e = 0.0;
  for (double a : action) e += a * a;
  return 0.5 * e;
}

bool ClipAction(std::vector<double>& action, double lo, double hi) {
  bool clipped = false;
  for (double& a : action) {
    if (std::isnan(a)) throw SimulationError("action contains NaN");
    const double c = std::clamp(a, lo, hi);
    if (c != a) {
      clipped = true;
      a = c;
    }
  }
  return clipped;
}

void CheckState(const EnvState& s, const std::string& where) {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (finite(s.q) && finite(s.q_dot) && finite(s.aux)) return;
  std::ostringstream msg;
  msg << where << ": non-finite state at t=" << s.t << " q=[";
  for (double v : s.q) msg << ' ' << v;
  msg << " ] q_dot=[";
  for (double v : s.q_dot) msg << ' ' << v;
  msg << " ] aux=[";
  for (double v : s.aux) msg << ' ' << v;
  msg << " ]";
  throw SimulationError(msg.str());
}

double WrapAngle(double a) {
  constexpr double kPi = std::numbers::pi;
  if (a > -kPi && a <= kPi) return a;
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace hears
