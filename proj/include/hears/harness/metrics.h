#ifndef HEARS_HARNESS_METRICS_H_
#define HEARS_HARNESS_METRICS_H_

#include <optional>
#include <span>
#include <vector>

namespace hears {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population convention
};

MeanStd ComputeMeanStd(std::span<const double> values);

// sigma / mu * 100 with the population sigma. Throws ModelError for an empty
// input or |mu| <= 1e-12, where the ratio is undefined.
double CoefficientOfVariation(std::span<const double> values);

// Index of the first episode whose trailing window mean (over `window`
// episodes ending there) reaches the threshold; none if it never does.
std::optional<int> EpisodesToThreshold(std::span<const double> returns, double threshold,
                                       int window);

// mean of the trailing `fraction` of the values (at least one value)
double StableMean(std::span<const double> values, double fraction = 0.2);
std::span<const double> StableTail(std::span<const double> values, double fraction = 0.2);

double Median(std::vector<double> values);

}  // namespace hears

#endif  // HEARS_HARNESS_METRICS_H_
