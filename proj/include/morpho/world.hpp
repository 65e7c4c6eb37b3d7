#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "agent.hpp"
#include "lattice.hpp"
#include "population.hpp"
#include "rng.hpp"

namespace morpho {

enum class StageOrder { motor_first, sensory_first };

struct WorldConfig {
  int width = 200;
  int height = 200;
  SensorParams sensors;
  MotorMode motor;
  double damping = 0.9;
  double deposit = 5.0;
  StageOrder order = StageOrder::motor_first;
  IlluminationRule illumination = IlluminationRule::per_sensor;
  ShrinkPolicy shrink;
  TurnoverPolicy turnover;

  void validate() const {
    require(width > 0 && height > 0, "lattice dimensions must be positive");
    require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
    require(deposit >= 0.0, "deposit must be non-negative");
    sensors.validate();
    motor.validate();
    shrink.validate();
    turnover.validate();
  }
};

struct StepStats {
  std::size_t cell_moves = 0;
  std::size_t projected_sites = 0;
  double projected_amount = 0.0;
  std::size_t removed = 0;
  std::size_t born = 0;
  std::size_t died = 0;
};

/// Trail field, particle population and stimulus schedule for one run.
///
/// A scheduler step runs, in order: active stimuli are projected; the motor
/// and sensory stages each sweep the population in a fresh random order
/// (motor first by default); the field diffuses and decays; shrinkage and,
/// every `turnover.frequency` steps, turnover are applied.
class World {
 public:
  World(const WorldConfig& cfg, std::uint64_t seed)
      : cfg_((cfg.validate(), cfg)), rng_(seed), trail_(cfg.width, cfg.height),
        pop_(cfg.width, cfg.height) {}

  const WorldConfig& config() const { return cfg_; }
  long step_count() const { return step_; }

  TrailField& trail() { return trail_; }
  const TrailField& trail() const { return trail_; }
  Population& population() { return pop_; }
  const Population& population() const { return pop_; }
  StimulusProgram& stimuli() { return stimuli_; }
  const StimulusProgram& stimuli() const { return stimuli_; }
  Rng& rng() { return rng_; }
  const StepStats& last_step() const { return stats_; }

  void step() {
    stats_ = {};
    const long t = step_;

    active_mask_ = nullptr;
    for (const StimulusEvent& e : stimuli_.events()) {
      if (!e.active_at(t)) continue;
      if (e.kind == StimulusKind::illumination_mask) {
        active_mask_ = &e.mask;
      } else {
        project_attractant(trail_, e.sites, e.magnitude);
        stats_.projected_sites += e.sites.size();
        stats_.projected_amount += e.magnitude * static_cast<double>(e.sites.size());
      }
    }

    if (cfg_.order == StageOrder::motor_first) {
      motor_stage();
      sensory_stage();
    } else {
      sensory_stage();
      motor_stage();
    }

    diffuse_and_damp(trail_, cfg_.damping, scratch_);

    stats_.removed = apply_shrinkage(pop_, cfg_.shrink, t, rng_);
    if (cfg_.turnover.enabled && t % cfg_.turnover.frequency == 0) {
      const TurnoverOutcome o = apply_turnover(pop_, cfg_.turnover, rng_);
      stats_.born = o.born;
      stats_.died = o.died;
    }

    ++step_;
    active_mask_ = nullptr;
    stimuli_.prune(step_);
  }

 private:
  void shuffled_order() {
    order_.resize(pop_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(std::span<std::size_t>(order_));
  }

  void motor_stage() {
    for (std::size_t i = 0; i < pop_.size(); ++i) pop_[i].moved = false;
    shuffled_order();
    const bool oscillatory = cfg_.motor.kind == MotorKind::oscillatory;
    for (std::size_t slot : order_) {
      const MotorOutcome o =
          oscillatory ? motor_stage_oscillatory(pop_, slot, trail_, cfg_.deposit,
                                                cfg_.motor.reset_probability, rng_)
                      : motor_stage_fluid(pop_, slot, trail_, cfg_.deposit, rng_);
      if (o.changed_cell) ++stats_.cell_moves;
    }
  }

  void sensory_stage() {
    shuffled_order();
    const IlluminationMask& mask = active_mask_ ? *active_mask_ : no_light_;
    for (std::size_t slot : order_) {
      pop_[slot].heading =
          morpho::sensory_stage(pop_[slot], trail_, mask, cfg_.sensors, rng_, cfg_.illumination);
    }
  }

  WorldConfig cfg_;
  Rng rng_;
  TrailField trail_;
  Population pop_;
  StimulusProgram stimuli_;
  IlluminationMask no_light_;
  const IlluminationMask* active_mask_ = nullptr;
  std::vector<double> scratch_;
  std::vector<std::size_t> order_;
  StepStats stats_;
  long step_ = 0;
};

}  // namespace morpho
