#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "agent.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace morpho {

enum class ShrinkKind { none, uniform_random };

struct ShrinkPolicy {
  ShrinkKind kind = ShrinkKind::none;
  double p_remove = 0.0005;
  long start_step = 0;

  void validate() const {
    require(p_remove >= 0.0 && p_remove <= 1.0, "removal probability must lie in [0, 1]");
    require(start_step >= 0, "shrink start step must be non-negative");
  }
};

struct TurnoverPolicy {
  bool enabled = false;
  int frequency = 2;
  int division_window = 9;
  int division_min = 1;
  int division_max = 10;
  // Minimum occupancy of the parent's 3x3 neighbourhood (parent included)
  // for division. 0 applies the window rule alone.
  int division_local_min = 3;
  int survival_window = 5;
  int survival_min = 0;
  int survival_max = 24;

  void validate() const {
    require(frequency >= 1, "turnover frequency must be >= 1");
    require(division_window > 0 && division_window % 2 == 1, "division window must be odd");
    require(survival_window > 0 && survival_window % 2 == 1, "survival window must be odd");
    require(division_local_min >= 0 && division_local_min <= 9, "division_local_min must be in [0, 9]");
  }
};

struct TurnoverOutcome {
  std::size_t born = 0;
  std::size_t died = 0;
};

/// Summed-area table over occupancy for O(1) window counts.
class OccupancyCounts {
 public:
  explicit OccupancyCounts(const OccupancyGrid& occ)
      : w_(occ.width()), h_(occ.height()),
        sums_(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0) {
    for (int y = 0; y < h_; ++y) {
      std::int32_t row = 0;
      for (int x = 0; x < w_; ++x) {
        row += occ.at(x, y) != OccupancyGrid::kEmpty ? 1 : 0;
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  /// Occupied cells in the (2r+1)^2 window centred on c, clipped to the lattice.
  int window(Cell c, int radius) const {
    const int x0 = std::max(0, c.x - radius);
    const int y0 = std::max(0, c.y - radius);
    const int x1 = std::min(w_, c.x + radius + 1);
    const int y1 = std::min(h_, c.y + radius + 1);
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }

 private:
  std::int32_t& at(int x, int y) { return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  std::int32_t at(int x, int y) const { return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }

  int w_;
  int h_;
  std::vector<std::int32_t> sums_;
};

/// Each live particle is removed independently with probability p_remove,
/// once `step` has reached the policy's start step.
inline std::size_t apply_shrinkage(Population& pop, const ShrinkPolicy& policy, long step, Rng& rng) {
  if (policy.kind == ShrinkKind::none || step < policy.start_step) return 0;
  std::size_t removed = 0;
  // Descending so the particle swapped into a freed slot has already been tested.
  for (std::size_t i = pop.size(); i-- > 0;) {
    if (rng.bernoulli(policy.p_remove)) {
      pop.remove(i);
      ++removed;
    }
  }
  return removed;
}

/// Division then survival. Division eligibility is judged on the occupancy
/// before any child is placed; survival on the occupancy after all children
/// are placed; deletions happen together at the end.
inline TurnoverOutcome apply_turnover(Population& pop, const TurnoverPolicy& policy, Rng& rng) {
  TurnoverOutcome out;
  if (!policy.enabled || pop.empty()) return out;

  std::vector<std::size_t> parents;
  {
    const OccupancyCounts counts(pop.occupancy());
    const int r = policy.division_window / 2;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!pop[i].moved) continue;
      const int n = counts.window(pop[i].cell(), r);
      if (n < policy.division_min || n > policy.division_max) continue;
      if (policy.division_local_min > 0 && counts.window(pop[i].cell(), 1) < policy.division_local_min) continue;
      parents.push_back(i);
    }
  }
  rng.shuffle(std::span<std::size_t>(parents));

  std::vector<Cell> empty;
  for (std::size_t slot : parents) {
    const Cell c = pop[slot].cell();
    empty.clear();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell n{c.x + dx, c.y + dy};
        if (pop.occupancy().in_bounds(n) && pop.occupancy().free(n)) empty.push_back(n);
      }
    if (empty.empty()) continue;
    const Cell site = empty[rng.below(empty.size())];
    if (pop.add_at_cell(site, rng.heading())) ++out.born;
  }

  std::vector<std::size_t> doomed;
  {
    const OccupancyCounts counts(pop.occupancy());
    const int r = policy.survival_window / 2;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const int n = counts.window(pop[i].cell(), r);
      if (n < policy.survival_min || n > policy.survival_max) doomed.push_back(i);
    }
  }
  for (auto it = doomed.rbegin(); it != doomed.rend(); ++it) pop.remove(*it);
  out.died = doomed.size();
  return out;
}

}  // namespace morpho
