#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace morpho {

struct Particle {
  std::uint64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // degrees, [0, 360)
  // Intended displacement accumulated while blocked (oscillatory mode only).
  double pending_dx = 0.0;
  double pending_dy = 0.0;
  // Set by the motor stage when the particle changed cell this step.
  bool moved = false;

  Cell cell() const { return cell_of(x, y); }
  Point position() const { return {x, y}; }
};

struct SensorParams {
  double offset = 9.0;     // SO, pixels
  double angle = 90.0;     // SA, degrees
  double rotation = 45.0;  // RA, degrees

  void validate() const {
    require(offset >= 3.0, "sensor offset must be at least 3 pixels");
    require(angle > 0.0 && angle <= 180.0, "sensor angle must lie in (0, 180]");
    require(rotation > 0.0 && rotation <= 180.0, "rotation angle must lie in (0, 180]");
  }
};

enum class MotorKind { fluid, oscillatory };

struct MotorMode {
  MotorKind kind = MotorKind::fluid;
  double reset_probability = 0.05;  // pID, oscillatory only

  void validate() const {
    require(reset_probability >= 0.0 && reset_probability <= 1.0, "pID must lie in [0, 1]");
  }
};

/// How illumination weights sensor reads.
enum class IlluminationRule {
  per_sensor,  // each sensor read weighted by whether its own cell is lit
  per_agent,   // all three reads weighted when the agent's body cell is lit
};

inline double normalize_heading(double degrees) {
  double h = std::fmod(degrees, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;  // fmod of tiny negatives rounds up to 360
  return h;
}

inline double radians(double degrees) { return degrees * (std::numbers::pi / 180.0); }

enum class Turn { none, left, right, random };

/// Branching of the sensory stage on the three sensor reads. Left is the
/// heading - SA side.
constexpr Turn choose_turn(double left, double front, double right) {
  if (front > left && front > right) return Turn::none;
  if (front < left && front < right) return Turn::random;
  if (left > right) return Turn::left;
  if (right > left) return Turn::right;
  return Turn::none;
}

struct SensorReadings {
  double left = 0.0;
  double front = 0.0;
  double right = 0.0;
};

inline Cell sensor_cell(const Particle& p, double heading_deg, double offset) {
  const double a = radians(heading_deg);
  return cell_of(p.x + offset * std::cos(a), p.y + offset * std::sin(a));
}

inline SensorReadings read_sensors(const Particle& p, const TrailField& field,
                                   const IlluminationMask& mask, const SensorParams& sp,
                                   IlluminationRule rule = IlluminationRule::per_sensor) {
  const Cell l = sensor_cell(p, p.heading - sp.angle, sp.offset);
  const Cell f = sensor_cell(p, p.heading, sp.offset);
  const Cell r = sensor_cell(p, p.heading + sp.angle, sp.offset);
  if (rule == IlluminationRule::per_sensor) {
    return {sample_weighted(field, l, mask), sample_weighted(field, f, mask),
            sample_weighted(field, r, mask)};
  }
  const Cell body = p.cell();
  const double w = mask.lit(body.x, body.y) ? mask.weight : 1.0;
  return {w * field.value_or_zero(l.x, l.y), w * field.value_or_zero(f.x, f.y),
          w * field.value_or_zero(r.x, r.y)};
}

inline double apply_turn(double heading, Turn turn, double rotation, Rng& rng) {
  switch (turn) {
    case Turn::none: return heading;
    case Turn::left: return normalize_heading(heading - rotation);
    case Turn::right: return normalize_heading(heading + rotation);
    case Turn::random:
      return normalize_heading(rng.bernoulli(0.5) ? heading - rotation : heading + rotation);
  }
  return heading;
}

/// Returns the particle's new heading after sensing.
inline double sensory_stage(const Particle& p, const TrailField& field,
                            const IlluminationMask& mask, const SensorParams& sp, Rng& rng,
                            IlluminationRule rule = IlluminationRule::per_sensor) {
  const SensorReadings s = read_sensors(p, field, mask, sp, rule);
  return apply_turn(p.heading, choose_turn(s.left, s.front, s.right), sp.rotation, rng);
}

/// Particles plus their occupancy lattice. Slots are dense; removal swaps the
/// last particle into the freed slot.
class Population {
 public:
  Population(int width, int height) : occupancy_(width, height) {}

  int width() const { return occupancy_.width(); }
  int height() const { return occupancy_.height(); }
  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }

  const OccupancyGrid& occupancy() const { return occupancy_; }
  const std::vector<Particle>& particles() const { return particles_; }
  Particle& operator[](std::size_t slot) { return particles_[slot]; }
  const Particle& operator[](std::size_t slot) const { return particles_[slot]; }

  /// Adds a particle at a continuous position. False if the cell is off the
  /// lattice or taken.
  bool add(double x, double y, double heading) {
    const Cell c = cell_of(x, y);
    if (!occupancy_.in_bounds(c) || !occupancy_.free(c)) return false;
    Particle p;
    p.id = next_id_++;
    p.x = x;
    p.y = y;
    p.heading = normalize_heading(heading);
    occupancy_.place(c, static_cast<std::int32_t>(particles_.size()));
    particles_.push_back(p);
    return true;
  }

  bool add_at_cell(Cell c, double heading) {
    const Point centre = cell_center(c);
    return add(centre.x, centre.y, heading);
  }

  void remove(std::size_t slot) {
    require(slot < particles_.size(), "remove: bad slot");
    occupancy_.vacate(particles_[slot].cell());
    const std::size_t last = particles_.size() - 1;
    if (slot != last) {
      particles_[slot] = particles_[last];
      occupancy_.relabel(particles_[slot].cell(), static_cast<std::int32_t>(slot));
    }
    particles_.pop_back();
  }

  /// Moves particle `slot` to a new continuous position whose cell is free or
  /// its own.
  void relocate(std::size_t slot, double x, double y) {
    Particle& p = particles_[slot];
    const Cell from = p.cell();
    const Cell to = cell_of(x, y);
    if (!(from == to)) {
      occupancy_.vacate(from);
      occupancy_.place(to, static_cast<std::int32_t>(slot));
    }
    p.x = x;
    p.y = y;
  }

  /// True when particles and occupied cells are in bijection.
  bool consistent() const {
    std::size_t occupied = 0;
    for (std::int32_t s : occupancy_.grid().values()) {
      if (s == OccupancyGrid::kEmpty) continue;
      ++occupied;
      if (s < 0 || static_cast<std::size_t>(s) >= particles_.size()) return false;
    }
    if (occupied != particles_.size()) return false;
    for (std::size_t i = 0; i < particles_.size(); ++i) {
      const Cell c = particles_[i].cell();
      if (!occupancy_.in_bounds(c) || occupancy_.at(c) != static_cast<std::int32_t>(i))
        return false;
    }
    return true;
  }

 private:
  std::vector<Particle> particles_;
  OccupancyGrid occupancy_;
  std::uint64_t next_id_ = 0;
};

struct MotorOutcome {
  bool advanced = false;      // position changed
  bool changed_cell = false;  // advanced into a new cell (deposit made)
};

namespace detail {

// Candidate one pixel ahead; returns true when the move is allowed.
inline bool forward_target(const Population& pop, const Particle& p, double& nx, double& ny) {
  const double a = radians(p.heading);
  nx = p.x + std::cos(a);
  ny = p.y + std::sin(a);
  const Cell to = cell_of(nx, ny);
  if (!pop.occupancy().in_bounds(to)) return false;
  return to == p.cell() || pop.occupancy().free(to);
}

inline MotorOutcome advance(Population& pop, std::size_t slot, double nx, double ny,
                            TrailField& field, double deposit) {
  const Cell from = pop[slot].cell();
  pop.relocate(slot, nx, ny);
  const Cell to = pop[slot].cell();
  const bool changed = !(from == to);
  if (changed) {
    field.deposit(to, deposit);
    pop[slot].moved = true;
  }
  return {true, changed};
}

}  // namespace detail

/// Default motor behaviour: step one pixel forward, or pick a random new
/// heading when the way is blocked.
inline MotorOutcome motor_stage_fluid(Population& pop, std::size_t slot, TrailField& field,
                                      double deposit, Rng& rng) {
  double nx = 0.0, ny = 0.0;
  if (detail::forward_target(pop, pop[slot], nx, ny))
    return detail::advance(pop, slot, nx, ny, field, deposit);
  pop[slot].heading = rng.heading();
  return {};
}

/// Inertial motor behaviour: each step the particle adds a unit step along its
/// heading to its pending displacement and tries to jump to pos + pending.
/// A successful move clears the pending displacement; a blocked particle
/// keeps it and resets (pending cleared, heading resampled) with probability
/// `reset_probability`.
inline MotorOutcome motor_stage_oscillatory(Population& pop, std::size_t slot, TrailField& field,
                                            double deposit, double reset_probability, Rng& rng) {
  Particle& p = pop[slot];
  const double a = radians(p.heading);
  p.pending_dx += std::cos(a);
  p.pending_dy += std::sin(a);
  const double nx = p.x + p.pending_dx, ny = p.y + p.pending_dy;
  const Cell to = cell_of(nx, ny);
  if (pop.occupancy().in_bounds(to) && (to == p.cell() || pop.occupancy().free(to))) {
    p.pending_dx = 0.0;
    p.pending_dy = 0.0;
    return detail::advance(pop, slot, nx, ny, field, deposit);
  }
  if (rng.bernoulli(reset_probability)) {
    p.pending_dx = 0.0;
    p.pending_dy = 0.0;
    p.heading = rng.heading();
  }
  return {};
}

}  // namespace morpho
