#ifndef HEARS_RNG_H_
#define HEARS_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hears {

// mt19937_64 with explicitly defined sampling transforms, so streams are
// identical across standard library implementations. Every draw consumes a
// fixed number of engine outputs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // [0, n)
  int UniformInt(int n) {
    return static_cast<int>(Uniform() * static_cast<double>(n)) % n;
  }

  // Box-Muller; two engine draws per call, no caching.
  double Normal() {
    double u1 = Uniform();
    double u2 = Uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hears

#endif  // HEARS_RNG_H_
