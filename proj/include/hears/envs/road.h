#ifndef HEARS_ENVS_ROAD_H_
#define HEARS_ENVS_ROAD_H_

#include <cstdint>
#include <string>
#include <vector>

namespace hears {

struct RoadSegmentSpec {
  double segment_min = 40.0;   // m
  double segment_max = 120.0;  // m
  double low_mu_probability = 0.3;
  double mu_low_min = 0.1;
  double mu_low_max = 0.5;
  double mu_high_min = 0.85;
  double mu_high_max = 1.0;
  double curvature_max = 1.0 / 80.0;  // 1/m
  double lateral_slope_max_deg = 8.0;
  double longitudinal_slope_max_deg = 6.0;
  double half_width = 2.5;  // lane half width, m
};

// Piecewise road description over arc length s in [0, length]. Friction is
// piecewise constant on segments. Curvature and both slopes are knot values
// at segment boundaries joined by cosine ramps (C1 in s).
struct RoadProfile {
  uint64_t seed = 0;
  double length = 0.0;
  double half_width = 2.5;
  std::vector<double> knots;           // boundaries, knots[0] = 0, back = length
  std::vector<double> mu;              // per segment (knots.size() - 1)
  std::vector<double> curvature;       // per knot
  std::vector<double> lateral_slope;   // per knot, degrees
  std::vector<double> longitudinal_slope;  // per knot, degrees

  double Friction(double s) const;
  double Curvature(double s) const;
  double LateralSlopeDeg(double s) const;
  double LongitudinalSlopeDeg(double s) const;

  // throws ModelError if mu leaves [0.1, 1] or a slope exceeds its cap
  void Validate() const;

  std::string ToJson() const;
  static RoadProfile FromJson(const std::string& text);
};

inline constexpr double kLateralSlopeCapDeg = 15.0;
inline constexpr double kLongitudinalSlopeCapDeg = 20.0;
inline constexpr double kTestRoadLength = 300.0;
inline constexpr double kTrainRoadLength = 1000.0;

// Deterministic per seed. Throws ModelError for length <= 0 or a spec that
// violates the caps.
RoadProfile GenerateRoad(uint64_t seed, double length, const RoadSegmentSpec& spec = {});

}  // namespace hears

#endif  // HEARS_ENVS_ROAD_H_
