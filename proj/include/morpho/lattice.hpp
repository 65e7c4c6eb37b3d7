#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "image.hpp"

namespace morpho {

/// Chemoattractant concentration per lattice cell. Values never go negative.
class TrailField {
 public:
  TrailField(int width, int height) : values_(width, height, 0.0) {}

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  bool in_bounds(Cell c) const { return values_.in_bounds(c); }

  double value(Cell c) const { return values_[c]; }
  // Out-of-bounds reads are 0.
  double value_or_zero(int x, int y) const {
    return values_.in_bounds(x, y) ? values_(x, y) : 0.0;
  }

  void deposit(Cell c, double amount) {
    require(values_.in_bounds(c), "deposit outside the lattice");
    require(amount >= 0.0, "deposit amount must be non-negative");
    values_[c] += amount;
  }

  double sum() const {
    double s = 0.0;
    for (double v : values_.values()) s += v;
    return s;
  }

  const Grid<double>& grid() const { return values_; }
  std::span<const double> values() const { return values_.values(); }

  friend bool operator==(const TrailField&, const TrailField&) = default;

 private:
  friend void diffuse_and_damp(TrailField&, double, std::vector<double>&);
  Grid<double> values_;
};

/// One diffusion pass in place: every cell becomes damping x the mean of its
/// 3x3 neighbourhood. Off-lattice neighbours count as zero but still divide
/// by 9, so mass leaks at the edges.
///
/// Each output is damping * ((row_above + row_here + row_below) / 9) where a
/// row term is (left + centre) + right; the separable pass below reproduces
/// that grouping exactly.
inline void diffuse_and_damp(TrailField& field, double damping, std::vector<double>& scratch) {
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
  const int w = field.width();
  const int h = field.height();
  auto cells = field.values_.values();
  scratch.resize(cells.size());

  for (int y = 0; y < h; ++y) {
    const double* in = cells.data() + static_cast<std::size_t>(y) * w;
    double* rows = scratch.data() + static_cast<std::size_t>(y) * w;
    if (w == 1) {
      rows[0] = in[0];
      continue;
    }
    rows[0] = (0.0 + in[0]) + in[1];
    for (int x = 1; x < w - 1; ++x) rows[x] = (in[x - 1] + in[x]) + in[x + 1];
    rows[w - 1] = (in[w - 2] + in[w - 1]) + 0.0;
  }

  const std::size_t stride = static_cast<std::size_t>(w);
  for (int y = 0; y < h; ++y) {
    const double* here = scratch.data() + y * stride;
    const double* above = y > 0 ? here - stride : nullptr;
    const double* below = y + 1 < h ? here + stride : nullptr;
    double* out = cells.data() + y * stride;
    for (int x = 0; x < w; ++x) {
      const double a = above ? above[x] : 0.0;
      const double b = below ? below[x] : 0.0;
      out[x] = damping * (((a + here[x]) + b) / 9.0);
    }
  }
}

inline TrailField diffuse_and_damp(const TrailField& field, double damping) {
  TrailField out = field;
  std::vector<double> scratch;
  diffuse_and_damp(out, damping, scratch);
  return out;
}

/// Adds `magnitude` to every site. Sites must lie on the lattice.
inline void project_attractant(TrailField& field, std::span<const Cell> sites, double magnitude) {
  for (Cell c : sites) field.deposit(c, magnitude);
}

/// Simulated illumination. Sensor reads landing on exposed cells are scaled
/// by `weight` while the mask is active.
struct IlluminationMask {
  bool active = false;
  Grid<std::uint8_t> exposed;
  double weight = 0.1;

  static IlluminationMask inactive() { return {}; }

  /// Every cell lit except an axis-aligned square window centred on `centre`.
  static IlluminationMask outside_window(int width, int height, Point centre, int side,
                                         double weight = 0.1) {
    require(weight > 0.0 && weight <= 1.0, "illumination weight must lie in (0, 1]");
    IlluminationMask m{true, Grid<std::uint8_t>(width, height, 1), weight};
    const int x0 = static_cast<int>(std::floor(centre.x - side / 2.0));
    const int y0 = static_cast<int>(std::floor(centre.y - side / 2.0));
    for (int y = std::max(0, y0); y < std::min(height, y0 + side); ++y)
      for (int x = std::max(0, x0); x < std::min(width, x0 + side); ++x) m.exposed(x, y) = 0;
    return m;
  }

  bool lit(int x, int y) const {
    return active && exposed.in_bounds(x, y) && exposed(x, y) != 0;
  }
};

inline double sample_weighted(const TrailField& field, Cell c, const IlluminationMask& mask) {
  const double v = field.value_or_zero(c.x, c.y);
  return mask.lit(c.x, c.y) ? v * mask.weight : v;
}

/// Linear clamp of concentration to 0..255.
inline GreyImage snapshot(const TrailField& field) {
  GreyImage img(field.width(), field.height());
  auto src = field.values();
  auto dst = img.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<std::uint8_t>(std::clamp(src[i], 0.0, 255.0));
  return img;
}

/// Single-occupancy particle lattice. Each cell holds at most one particle
/// slot index, or `kEmpty`.
class OccupancyGrid {
 public:
  static constexpr std::int32_t kEmpty = -1;

  OccupancyGrid(int width, int height) : slots_(width, height, kEmpty) {}

  int width() const { return slots_.width(); }
  int height() const { return slots_.height(); }
  bool in_bounds(Cell c) const { return slots_.in_bounds(c); }

  bool free(Cell c) const { return slots_[c] == kEmpty; }
  std::int32_t at(Cell c) const { return slots_[c]; }
  std::int32_t at(int x, int y) const { return slots_(x, y); }

  void place(Cell c, std::int32_t slot) {
    require(slots_.in_bounds(c), "placement outside the lattice");
    require(slots_[c] == kEmpty, "cell already occupied");
    slots_[c] = slot;
  }
  void vacate(Cell c) { slots_[c] = kEmpty; }
  void relabel(Cell c, std::int32_t slot) { slots_[c] = slot; }

  const Grid<std::int32_t>& grid() const { return slots_; }

 private:
  Grid<std::int32_t> slots_;
};

enum class StimulusKind { attractant_points, attractant_pattern, illumination_mask };

struct StimulusEvent {
  long start = 0;
  long duration = 1;
  StimulusKind kind = StimulusKind::attractant_points;
  std::vector<Cell> sites;   // attractant kinds
  IlluminationMask mask;     // illumination kind
  double magnitude = 10.0;   // attractant per site per step

  bool active_at(long step) const { return step >= start && step < start + duration; }
};

/// Time-ordered schedule of stimulus events.
class StimulusProgram {
 public:
  void add(StimulusEvent e) {
    require(e.duration >= 1, "stimulus duration must be at least one step");
    require(events_.empty() || e.start >= events_.back().start,
            "stimulus events must be added in time order");
    if (e.kind == StimulusKind::illumination_mask)
      require(e.mask.weight > 0.0 && e.mask.weight <= 1.0, "illumination weight must lie in (0, 1]");
    events_.push_back(std::move(e));
  }

  /// Drops events that finished before `step`.
  void prune(long step) {
    std::erase_if(events_, [step](const StimulusEvent& e) { return e.start + e.duration <= step; });
  }

  std::span<const StimulusEvent> events() const { return events_; }
  bool empty() const { return events_.empty(); }

 private:
  std::vector<StimulusEvent> events_;
};

}  // namespace morpho
