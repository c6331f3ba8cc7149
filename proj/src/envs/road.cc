#include "hears/envs/road.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "hears/rng.h"
#include "hears/types.h"

namespace hears {

namespace {

size_t SegmentOf(const std::vector<double>& knots, double s) {
  if (s <= knots.front()) return 0;
  if (s >= knots.back()) return knots.size() - 2;
  const auto it = std::upper_bound(knots.begin(), knots.end(), s);
  return static_cast<size_t>(it - knots.begin()) - 1;
}

double Ramp(const std::vector<double>& knots, const std::vector<double>& values, double s) {
  const size_t i = SegmentOf(knots, s);
  const double lo = knots[i], hi = knots[i + 1];
  const double u = std::clamp((s - lo) / (hi - lo), 0.0, 1.0);
  const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  return values[i] + (values[i + 1] - values[i]) * w;
}

}  // namespace

double RoadProfile::Friction(double s) const { return mu[SegmentOf(knots, s)]; }
double RoadProfile::Curvature(double s) const { return Ramp(knots, curvature, s); }
double RoadProfile::LateralSlopeDeg(double s) const { return Ramp(knots, lateral_slope, s); }
double RoadProfile::LongitudinalSlopeDeg(double s) const {
  return Ramp(knots, longitudinal_slope, s);
}

void RoadProfile::Validate() const {
  if (!(length > 0.0)) throw ModelError("road: length must be positive");
  if (knots.size() < 2 || mu.size() != knots.size() - 1 || curvature.size() != knots.size() ||
      lateral_slope.size() != knots.size() || longitudinal_slope.size() != knots.size()) {
    throw ModelError("road: inconsistent table sizes");
  }
  for (double m : mu) {
    if (!(m >= 0.1 && m <= 1.0)) throw ModelError("road: friction outside [0.1, 1]");
  }
  for (double v : lateral_slope) {
    if (!(std::abs(v) <= kLateralSlopeCapDeg)) throw ModelError("road: lateral slope above cap");
  }
  for (double v : longitudinal_slope) {
    if (!(std::abs(v) <= kLongitudinalSlopeCapDeg)) {
      throw ModelError("road: longitudinal slope above cap");
    }
  }
}

std::string RoadProfile::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["length"] = length;
  j["half_width"] = half_width;
  j["knots"] = knots;
  j["mu"] = mu;
  j["curvature"] = curvature;
  j["lateral_slope_deg"] = lateral_slope;
  j["longitudinal_slope_deg"] = longitudinal_slope;
  return j.dump(2);
}

RoadProfile RoadProfile::FromJson(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RoadProfile r;
  r.seed = j.at("seed").get<uint64_t>();
  r.length = j.at("length").get<double>();
  r.half_width = j.at("half_width").get<double>();
  r.knots = j.at("knots").get<std::vector<double>>();
  r.mu = j.at("mu").get<std::vector<double>>();
  r.curvature = j.at("curvature").get<std::vector<double>>();
  r.lateral_slope = j.at("lateral_slope_deg").get<std::vector<double>>();
  r.longitudinal_slope = j.at("longitudinal_slope_deg").get<std::vector<double>>();
  r.Validate();
  return r;
}

RoadProfile GenerateRoad(uint64_t seed, double length, const RoadSegmentSpec& spec) {
  if (!(length > 0.0)) throw ModelError("GenerateRoad: length must be positive");
  if (spec.lateral_slope_max_deg > kLateralSlopeCapDeg ||
      spec.longitudinal_slope_max_deg > kLongitudinalSlopeCapDeg ||
      spec.lateral_slope_max_deg < 0.0 || spec.longitudinal_slope_max_deg < 0.0) {
    throw ModelError("GenerateRoad: slope limits exceed the caps");
  }
  if (spec.mu_low_min < 0.1 || spec.mu_high_max > 1.0 || spec.mu_low_min > spec.mu_low_max ||
      spec.mu_high_min > spec.mu_high_max) {
    throw ModelError("GenerateRoad: friction range outside [0.1, 1]");
  }
  if (!(spec.segment_min > 0.0 && spec.segment_max >= spec.segment_min)) {
    throw ModelError("GenerateRoad: invalid segment lengths");
  }
  Rng rng(seed);
  RoadProfile r;
  r.seed = seed;
  r.length = length;
  r.half_width = spec.half_width;
  r.knots.push_back(0.0);
  // start straight and level so the vehicle can pull away
  r.curvature.push_back(0.0);
  r.lateral_slope.push_back(0.0);
  r.longitudinal_slope.push_back(0.0);
  double s = 0.0;
  while (s < length) {
    const double seg = rng.Uniform(spec.segment_min, spec.segment_max);
    const bool low = rng.Uniform() < spec.low_mu_probability;
    const double mu = low ? rng.Uniform(spec.mu_low_min, spec.mu_low_max)
                          : rng.Uniform(spec.mu_high_min, spec.mu_high_max);
    const double kappa = rng.Uniform(-spec.curvature_max, spec.curvature_max);
    const double lat = rng.Uniform(-spec.lateral_slope_max_deg, spec.lateral_slope_max_deg);
    const double lon =
        rng.Uniform(-spec.longitudinal_slope_max_deg, spec.longitudinal_slope_max_deg);
    s = std::min(length, s + seg);
    // never leave a sliver segment at the end
    if (length - s < 0.5 * spec.segment_min) s = length;
    r.knots.push_back(s);
    r.mu.push_back(r.mu.empty() ? std::max(mu, spec.mu_high_min) : mu);
    r.curvature.push_back(kappa);
    r.lateral_slope.push_back(lat);
    r.longitudinal_slope.push_back(lon);
  }
  r.Validate();
  return r;
}

}  // namespace hears
