#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "world.hpp"

namespace morpho {

/// Called with the world once before the first step and after every step.
using StepObserver = std::function<void(const World&)>;

struct TraceRecord {
  long step = 0;
  Point blob;
  std::size_t population = 0;
  double error = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Centroid by shrinkage

enum class ShrinkSchedule { immediate, delayed };

struct CentroidRunConfig {
  ShapeMask mask;
  int hold_steps = 50;
  ShrinkSchedule schedule = ShrinkSchedule::immediate;
  long delay_steps = 5000;     // shrink start for the delayed schedule
  double p_remove = 0.0005;
  std::size_t halt_population = 50;
  SensorParams sensors;
  double damping = 0.9;
  double projection_magnitude = 10.0;
  double density = 1.0;        // fraction of inside cells seeded with a particle
  int margin = 20;             // empty border around the mask
  long max_steps = 100000;
  StageOrder order = StageOrder::motor_first;
  int record_every = 1;
  std::uint64_t seed = 1;
};

struct CentroidResult {
  std::vector<TraceRecord> trace;
  Point reference;       // image centroid in continuous lattice coordinates
  Point final_centroid;
  double final_error = 0.0;
  long halt_step = 0;
  bool halted_on_population = false;
  std::size_t initial_population = 0;
};

namespace detail {

inline void validate_common(const SensorParams& sp, double damping, double magnitude,
                            std::size_t halt, long max_steps, int record_every) {
  try {
    sp.validate();
  } catch (const ContractViolation& e) {
    throw InputError(e.what());
  }
  if (!(damping > 0.0 && damping <= 1.0)) throw InputError("damping must lie in (0, 1]");
  if (magnitude < 0.0) throw InputError("projection magnitude must be non-negative");
  if (halt < 1) throw InputError("halt population must be at least 1");
  if (max_steps < 1) throw InputError("max_steps must be positive");
  if (record_every < 1) throw InputError("record_every must be positive");
}

/// Seeds one particle on each chosen cell (all of them at density 1) with a
/// random heading.
inline void seed_on_cells(World& world, std::vector<Cell> cells, double density) {
  Rng& rng = world.rng();
  if (density < 1.0) {
    rng.shuffle(std::span<Cell>(cells));
    cells.resize(static_cast<std::size_t>(std::llround(density * static_cast<double>(cells.size()))));
  }
  for (Cell c : cells) world.population().add_at_cell(c, rng.heading());
}

inline bool want_record(long step, int every, bool last) { return last || step % every == 0; }

}  // namespace detail

/// Throws InputError for a configuration run_centroid would reject.
inline void validate(const CentroidRunConfig& cfg) {
  detail::validate_common(cfg.sensors, cfg.damping, cfg.projection_magnitude, cfg.halt_population,
                          cfg.max_steps, cfg.record_every);
  if (cfg.hold_steps < 0) throw InputError("hold steps must be non-negative");
  if (cfg.delay_steps < 0) throw InputError("delay steps must be non-negative");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) throw InputError("density must lie in (0, 1]");
  if (cfg.margin < 0) throw InputError("margin must be non-negative");
  if (!(cfg.p_remove >= 0.0 && cfg.p_remove <= 1.0)) throw InputError("p_remove must lie in [0, 1]");
  if (cfg.mask.width() == 0) throw InputError("no shape mask given");
  const auto seeded = static_cast<std::size_t>(
      std::llround(cfg.density * static_cast<double>(cfg.mask.count())));
  if (seeded < cfg.halt_population)
    throw InputError("mask holds fewer particles than the halt population");
}

inline CentroidResult run_centroid(const CentroidRunConfig& cfg, const StepObserver& observer = {}) {
  validate(cfg);
  const ShapeMask mask = cfg.mask.padded(cfg.margin);
  const std::vector<Cell> inside = mask.cells();

  WorldConfig wc;
  wc.width = mask.width();
  wc.height = mask.height();
  wc.sensors = cfg.sensors;
  wc.damping = cfg.damping;
  wc.order = cfg.order;
  wc.shrink.kind = ShrinkKind::uniform_random;
  wc.shrink.p_remove = cfg.p_remove;
  wc.shrink.start_step = cfg.schedule == ShrinkSchedule::immediate
                             ? cfg.hold_steps
                             : std::max<long>(cfg.delay_steps, cfg.hold_steps);
  World world(wc, cfg.seed);
  detail::seed_on_cells(world, inside, cfg.density);

  if (cfg.hold_steps > 0) {
    StimulusEvent hold;
    hold.start = 0;
    hold.duration = cfg.hold_steps;
    hold.kind = StimulusKind::attractant_pattern;
    hold.sites = inside;
    hold.magnitude = cfg.projection_magnitude;
    world.stimuli().add(std::move(hold));
  }

  CentroidResult res;
  const Point c = image_centroid(mask);
  res.reference = {c.x + 0.5, c.y + 0.5};
  res.initial_population = world.population().size();

  auto record = [&](bool last) {
    const long t = world.step_count();
    const Point b = blob_centroid(world.population());
    res.final_centroid = b;
    res.final_error = distance(b, res.reference);
    if (detail::want_record(t, cfg.record_every, last))
      res.trace.push_back({t, b, world.population().size(), res.final_error});
  };

  if (observer) observer(world);
  record(false);
  while (world.step_count() < cfg.max_steps) {
    world.step();
    if (observer) observer(world);
    if (world.population().empty()) {
      res.halted_on_population = true;
      break;
    }
    const bool halting = world.population().size() < cfg.halt_population;
    record(halting || world.step_count() == cfg.max_steps);
    if (halting) {
      res.halted_on_population = true;
      break;
    }
  }
  res.halt_step = world.step_count();
  return res;
}

// ---------------------------------------------------------------------------
// Arithmetic mean of an encoded series

struct MeanRunConfig {
  DataSeries series;
  SeriesEncoding encoding;
  int hold_steps = 20;
  TurnoverPolicy turnover{.enabled = true};
  std::size_t halt_population = 50;
  SensorParams sensors;
  double damping = 0.9;
  double projection_magnitude = 10.0;
  long max_steps = 100000;
  StageOrder order = StageOrder::motor_first;
  int record_every = 1;
  std::uint64_t seed = 1;
};

struct MeanResult {
  std::vector<TraceRecord> trace;  // error in pixels
  double true_mean = 0.0;
  double final_value = 0.0;
  double error_px = 0.0;           // |final_value - true_mean| * scale
  double signed_error = 0.0;       // final_value - true_mean, value units
  long halt_step = 0;
  bool halted_on_population = false;
  std::size_t initial_population = 0;
};

/// Throws InputError for a configuration run_mean would reject; returns the
/// encoded series.
inline ShapeMask validate(const MeanRunConfig& cfg) {
  detail::validate_common(cfg.sensors, cfg.damping, cfg.projection_magnitude, cfg.halt_population,
                          cfg.max_steps, cfg.record_every);
  if (cfg.hold_steps < 0) throw InputError("hold steps must be non-negative");
  try {
    cfg.turnover.validate();
  } catch (const ContractViolation& e) {
    throw InputError(e.what());
  }
  ShapeMask mask = encode_series(cfg.series, cfg.encoding);
  if (count_components(mask) != 1) throw InputError("encoded series is not connected");
  if (mask.count() < cfg.halt_population)
    throw InputError("encoded series holds fewer particles than the halt population");
  return mask;
}

inline MeanResult run_mean(const MeanRunConfig& cfg, const StepObserver& observer = {}) {
  const ShapeMask mask = validate(cfg);
  const std::vector<Cell> inside = mask.cells();

  WorldConfig wc;
  wc.width = mask.width();
  wc.height = mask.height();
  wc.sensors = cfg.sensors;
  wc.damping = cfg.damping;
  wc.order = cfg.order;
  wc.turnover = cfg.turnover;
  World world(wc, cfg.seed);
  detail::seed_on_cells(world, inside, 1.0);

  if (cfg.hold_steps > 0) {
    StimulusEvent hold;
    hold.duration = cfg.hold_steps;
    hold.kind = StimulusKind::attractant_pattern;
    hold.sites = inside;
    hold.magnitude = cfg.projection_magnitude;
    world.stimuli().add(std::move(hold));
  }

  MeanResult res;
  res.true_mean = arithmetic_mean(cfg.series);
  res.initial_population = world.population().size();
  const double hi = cfg.series.hi;
  const double scale = cfg.encoding.scale;

  auto record = [&](bool last) {
    const long t = world.step_count();
    const Point b = blob_centroid(world.population());
    res.final_value = cfg.encoding.value_of(b.y, hi);
    res.signed_error = res.final_value - res.true_mean;
    res.error_px = std::abs(res.signed_error) * scale;
    if (detail::want_record(t, cfg.record_every, last))
      res.trace.push_back({t, b, world.population().size(), res.error_px});
  };

  if (observer) observer(world);
  record(false);
  while (world.step_count() < cfg.max_steps) {
    world.step();
    if (observer) observer(world);
    if (world.population().empty()) {
      res.halted_on_population = true;
      break;
    }
    const bool halting = world.population().size() < cfg.halt_population;
    record(halting || world.step_count() == cfg.max_steps);
    if (halting) {
      res.halted_on_population = true;
      break;
    }
  }
  res.halt_step = world.step_count();
  return res;
}

// ---------------------------------------------------------------------------
// Tracking a moving target from noisy stimuli

/// Archimedean spiral about the arena centre: theta = k * angle_step,
/// radius = growth * theta.
struct SpiralParams {
  double growth = 30.0;       // pixels of radius per radian
  double angle_step = 0.008;  // radians per target update
};

struct Arena {
  int width = 400;
  int height = 400;
  double margin = 18.0;  // target within this distance of an edge ends a run

  Point centre() const { return {width / 2.0, height / 2.0}; }
  bool interior(Point p) const {
    return p.x >= margin && p.y >= margin && p.x <= width - margin && p.y <= height - margin;
  }
};

/// Target position at update k, or nothing once the spiral has reached the
/// arena margin.
inline std::optional<Point> spiral_target(long k, const SpiralParams& sp, const Arena& arena) {
  require(k >= 0, "spiral index must be non-negative");
  const double theta = static_cast<double>(k) * sp.angle_step;
  const double r = sp.growth * theta;
  const Point c = arena.centre();
  const Point p{c.x + r * std::cos(theta), c.y + r * std::sin(theta)};
  if (!arena.interior(p)) return std::nullopt;
  return p;
}

/// Independent zero-mean Gaussian noise per axis, clamped to the arena.
inline Point add_noise(Point p, double sigma, Rng& rng, const Arena& arena) {
  require(sigma >= 0.0, "noise sigma must be non-negative");
  if (sigma == 0.0) return p;
  const double x = rng.normal(p.x, sigma);
  const double y = rng.normal(p.y, sigma);
  return {std::clamp(x, 0.0, std::nextafter(static_cast<double>(arena.width), 0.0)),
          std::clamp(y, 0.0, std::nextafter(static_cast<double>(arena.height), 0.0))};
}

enum class StimulusMode { positive, negative, alternating };

struct TrackingRunConfig {
  Arena arena;
  std::size_t population = 1500;
  int init_window = 80;
  StimulusMode mode = StimulusMode::negative;
  double noise_sigma = 0.0;
  int update_period = 25;
  int projection_duration = 10;
  int alternation_period = 10;
  int mask_size = 50;
  double illumination_weight = 0.1;
  double point_magnitude = 10.0;
  double point_radius = 3.0;   // disc of cells around the reading; 0 = one cell
  SpiralParams spiral;
  MotorMode motor{MotorKind::oscillatory, 0.05};
  SensorParams sensors;
  double damping = 0.93;
  long coalescence_steps = 250;
  long max_steps = 100000;
  IlluminationRule illumination = IlluminationRule::per_sensor;
  StageOrder order = StageOrder::motor_first;
  int record_every = 1;
  std::uint64_t seed = 1;
};

struct TrackingRecord {
  long step = 0;
  Point target;     // true position p
  Point stimulus;   // noisy reading n
  Point blob;       // blob centroid b
  std::size_t population = 0;
  double error = 0.0;  // |p - b|
};

struct TrackingResult {
  std::vector<TrackingRecord> trace;
  double mean_error = 0.0;  // over scored steps (step >= coalescence)
  double max_error = 0.0;
  long scored_steps = 0;
  long target_updates = 0;
  long halt_step = 0;
};

inline std::vector<Cell> disc_sites(Point c, double radius, const Arena& arena) {
  std::vector<Cell> sites;
  const Cell centre = cell_of(c.x, c.y);
  const int r = static_cast<int>(std::ceil(radius));
  for (int y = centre.y - r; y <= centre.y + r; ++y)
    for (int x = centre.x - r; x <= centre.x + r; ++x) {
      if (x < 0 || y < 0 || x >= arena.width || y >= arena.height) continue;
      if (std::hypot(x - centre.x, y - centre.y) <= radius) sites.push_back({x, y});
    }
  return sites;
}

/// Throws InputError for a configuration run_tracking would reject.
inline void validate(const TrackingRunConfig& cfg) {
  detail::validate_common(cfg.sensors, cfg.damping, cfg.point_magnitude, 1, cfg.max_steps,
                          cfg.record_every);
  const Arena& arena = cfg.arena;
  if (arena.width <= 0 || arena.height <= 0) throw InputError("arena dimensions must be positive");
  if (cfg.update_period < 1 || cfg.projection_duration < 1 || cfg.alternation_period < 1)
    throw InputError("tracking periods must be at least one step");
  if (cfg.mask_size < 1 || cfg.mask_size > std::min(arena.width, arena.height))
    throw InputError("illumination window must fit the arena");
  if (!(cfg.illumination_weight > 0.0 && cfg.illumination_weight <= 1.0))
    throw InputError("illumination weight must lie in (0, 1]");
  if (cfg.noise_sigma < 0.0) throw InputError("noise sigma must be non-negative");
  if (cfg.init_window < 1 || cfg.init_window > std::min(arena.width, arena.height))
    throw InputError("initial window must fit the arena");
  if (cfg.population > static_cast<std::size_t>(cfg.init_window) * cfg.init_window)
    throw InputError("population does not fit the initial window");
  if (cfg.point_radius < 0.0) throw InputError("point radius must be non-negative");
  if (cfg.coalescence_steps < 0) throw InputError("coalescence steps must be non-negative");
  if (cfg.spiral.growth < 0.0 || cfg.spiral.angle_step < 0.0)
    throw InputError("spiral parameters must be non-negative");
  if (!arena.interior(arena.centre())) throw InputError("arena too small for its margin");
  try {
    cfg.motor.validate();
  } catch (const ContractViolation& e) {
    throw InputError(e.what());
  }
}

inline TrackingResult run_tracking(const TrackingRunConfig& cfg, const StepObserver& observer = {}) {
  validate(cfg);
  const Arena& arena = cfg.arena;
  WorldConfig wc;
  wc.width = arena.width;
  wc.height = arena.height;
  wc.sensors = cfg.sensors;
  wc.motor = cfg.motor;
  wc.damping = cfg.damping;
  wc.order = cfg.order;
  wc.illumination = cfg.illumination;
  World world(wc, cfg.seed);
  Rng& rng = world.rng();

  {
    std::vector<Cell> window;
    const Point c = arena.centre();
    const int x0 = static_cast<int>(c.x) - cfg.init_window / 2;
    const int y0 = static_cast<int>(c.y) - cfg.init_window / 2;
    for (int y = y0; y < y0 + cfg.init_window; ++y)
      for (int x = x0; x < x0 + cfg.init_window; ++x) window.push_back({x, y});
    rng.shuffle(std::span<Cell>(window));
    window.resize(cfg.population);
    for (Cell cell : window) world.population().add_at_cell(cell, rng.heading());
  }

  auto positive = [&](long start, int duration, Point n) {
    StimulusEvent e;
    e.start = start;
    e.duration = duration;
    e.kind = StimulusKind::attractant_points;
    e.sites = disc_sites(n, cfg.point_radius, arena);
    e.magnitude = cfg.point_magnitude;
    world.stimuli().add(std::move(e));
  };
  auto negative = [&](long start, int duration, Point n) {
    StimulusEvent e;
    e.start = start;
    e.duration = duration;
    e.kind = StimulusKind::illumination_mask;
    e.mask = IlluminationMask::outside_window(arena.width, arena.height, n, cfg.mask_size,
                                              cfg.illumination_weight);
    world.stimuli().add(std::move(e));
  };

  TrackingResult res;
  Point target = arena.centre();
  Point reading = target;
  double error_sum = 0.0;

  if (observer) observer(world);
  while (world.step_count() < cfg.max_steps) {
    const long t = world.step_count();
    if (t % cfg.update_period == 0) {
      const long k = t < cfg.coalescence_steps ? 0 : (t - cfg.coalescence_steps) / cfg.update_period;
      const auto next = spiral_target(k, cfg.spiral, arena);
      if (!next) break;
      if (k > 0) ++res.target_updates;
      target = *next;
      reading = add_noise(target, cfg.noise_sigma, rng, arena);
      if (cfg.mode == StimulusMode::positive) positive(t, cfg.projection_duration, reading);
      if (cfg.mode == StimulusMode::negative) negative(t, cfg.projection_duration, reading);
      if (cfg.mode == StimulusMode::alternating) {
        const int first = std::min(cfg.alternation_period, cfg.update_period);
        positive(t, first, reading);
        const int second = std::min(cfg.alternation_period, cfg.update_period - first);
        if (second > 0) negative(t + first, second, reading);
      }
    }

    world.step();
    if (observer) observer(world);
    if (world.population().empty()) break;

    const Point b = blob_centroid(world.population());
    const double err = distance(target, b);
    if (t >= cfg.coalescence_steps) {
      error_sum += err;
      ++res.scored_steps;
      res.max_error = std::max(res.max_error, err);
    }
    if (world.step_count() % cfg.record_every == 0)
      res.trace.push_back({world.step_count(), target, reading, b, world.population().size(), err});
  }
  res.mean_error = res.scored_steps > 0 ? error_sum / static_cast<double>(res.scored_steps) : 0.0;
  res.halt_step = world.step_count();
  return res;
}

}  // namespace morpho
