#include "hears/harness/metrics.h"

#include <algorithm>
#include <cmath>

#include "hears/types.h"

namespace hears {

MeanStd ComputeMeanStd(std::span<const double> values) {
  MeanStd m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(var / static_cast<double>(values.size()));
  return m;
}

double CoefficientOfVariation(std::span<const double> values) {
  if (values.empty()) throw ModelError("CoefficientOfVariation: empty input");
  const MeanStd m = ComputeMeanStd(values);
  if (std::abs(m.mean) <= 1e-12) throw ModelError("CoefficientOfVariation: mean is ~0, CV undefined");
  // magnitude of the mean so negative-return tasks report a positive spread
  return m.std / std::abs(m.mean) * 100.0;
}

std::optional<int> EpisodesToThreshold(std::span<const double> returns, double threshold,
                                       int window) {
  if (window < 1) throw ModelError("EpisodesToThreshold: window must be >= 1");
  const size_t w = static_cast<size_t>(window);
  for (size_t i = w - 1; i < returns.size(); ++i) {
    double sum = 0.0;
    for (size_t k = i + 1 - w; k <= i; ++k) sum += returns[k];
    if (sum / static_cast<double>(w) >= threshold) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::span<const double> StableTail(std::span<const double> values, double fraction) {
  if (values.empty()) return values;
  size_t n = static_cast<size_t>(std::ceil(fraction * static_cast<double>(values.size())));
  n = std::clamp<size_t>(n, 1, values.size());
  return values.subspan(values.size() - n);
}

double StableMean(std::span<const double> values, double fraction) {
  if (values.empty()) throw ModelError("StableMean: empty input");
  return ComputeMeanStd(StableTail(values, fraction)).mean;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw ModelError("Median: empty input");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace hears
