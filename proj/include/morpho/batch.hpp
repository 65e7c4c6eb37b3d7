#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"
#include "metrics.hpp"

namespace morpho {

struct BatchResult {
  std::vector<RunMetrics> runs;
  std::vector<double> covariate;  // series standard deviation, mean experiments only
  BatchSummary summary;
};

/// Per-run hook: run index, run seed, and a step observer factory result.
using ObserverFactory = std::function<StepObserver(std::size_t run, std::uint64_t seed)>;

/// Run i uses seed base + i. Runs share no state, so a batch equals its runs
/// executed one by one.
inline std::uint64_t run_seed(std::uint64_t base, std::size_t i) { return base + i; }

inline BatchResult run_batch(const CentroidSpec& spec, std::uint64_t base, std::size_t runs,
                             const ObserverFactory& obs = {}) {
  if (runs < 1) throw InputError("runs must be at least 1");
  const ShapeMask mask = resolve_mask(spec);
  BatchResult b;
  for (std::size_t i = 0; i < runs; ++i) {
    const std::uint64_t seed = run_seed(base, i);
    const CentroidResult r = run_centroid(centroid_run(spec, mask, seed), obs ? obs(i, seed) : StepObserver{});
    b.runs.push_back(to_metrics(r, seed));
  }
  b.summary = aggregate(b.runs);
  return b;
}

inline BatchResult run_batch(const MeanSpec& spec, std::uint64_t base, std::size_t runs,
                             const ObserverFactory& obs = {}) {
  if (runs < 1) throw InputError("runs must be at least 1");
  BatchResult b;
  for (std::size_t i = 0; i < runs; ++i) {
    const std::uint64_t seed = run_seed(base, i);
    const MeanRunConfig cfg = mean_run(spec, seed);
    const MeanResult r = run_mean(cfg, obs ? obs(i, seed) : StepObserver{});
    b.runs.push_back(to_metrics(r, seed));
    b.covariate.push_back(population_stddev(cfg.series.values));
  }
  b.summary = aggregate(b.runs);
  if (runs >= 2) {
    try {
      b.summary = aggregate(b.runs, b.covariate);
    } catch (const EstimationError&) {
    }
  }
  return b;
}

inline BatchResult run_batch(const TrackSpec& spec, std::uint64_t base, std::size_t runs,
                             const ObserverFactory& obs = {}) {
  if (runs < 1) throw InputError("runs must be at least 1");
  BatchResult b;
  for (std::size_t i = 0; i < runs; ++i) {
    const std::uint64_t seed = run_seed(base, i);
    const TrackingResult r = run_tracking(track_run(spec, seed), obs ? obs(i, seed) : StepObserver{});
    b.runs.push_back(to_metrics(r, seed));
  }
  b.summary = aggregate(b.runs);
  return b;
}

}  // namespace morpho
