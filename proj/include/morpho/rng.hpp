#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace morpho {

// One engine per run. Every stochastic choice in a run draws from it in a
// fixed order, so a run is a pure function of (config, seed).
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return unit_(engine_) < p;
  }

  double normal(double mean, double sd) {
    if (sd == 0.0) return mean;
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  // Heading in degrees, [0, 360).
  double heading() { return 360.0 * unit_(engine_); }

  template <typename T>
  void shuffle(std::span<T> items) {
    std::shuffle(items.begin(), items.end(), engine_);
  }

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace morpho
