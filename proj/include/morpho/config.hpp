#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "experiments.hpp"
#include "shapes.hpp"

namespace morpho {

// Experiment descriptions as read from a config file. Each one expands into
// a run configuration per seed.

struct CentroidSpec {
  std::string shape = "lizard";  // built-in shape, ignored when mask_path is set
  std::string mask_path;         // greyscale PGM, inside where value >= threshold
  int threshold = 128;
  std::size_t runs = 10;
  CentroidRunConfig run;
};

enum class SeriesKind { uniform, skewed };

struct MeanSpec {
  SeriesKind data = SeriesKind::uniform;
  std::vector<double> values;  // fixed series; generated per run when empty
  std::size_t count = 20;
  double lo = 0.0;
  double hi = 100.0;
  bool sorted = false;
  std::size_t runs = 50;
  MeanRunConfig run;
};

struct TrackSpec {
  std::size_t runs = 1;
  TrackingRunConfig run;
};

namespace config_detail {

template <class E>
using Names = std::vector<std::pair<E, const char*>>;

inline const Names<ShrinkSchedule>& names(ShrinkSchedule) {
  static const Names<ShrinkSchedule> n{{ShrinkSchedule::immediate, "immediate"},
                                       {ShrinkSchedule::delayed, "delayed"}};
  return n;
}
inline const Names<StageOrder>& names(StageOrder) {
  static const Names<StageOrder> n{{StageOrder::motor_first, "motor_first"},
                                   {StageOrder::sensory_first, "sensory_first"}};
  return n;
}
inline const Names<MotorKind>& names(MotorKind) {
  static const Names<MotorKind> n{{MotorKind::fluid, "fluid"}, {MotorKind::oscillatory, "oscillatory"}};
  return n;
}
inline const Names<IlluminationRule>& names(IlluminationRule) {
  static const Names<IlluminationRule> n{{IlluminationRule::per_sensor, "per_sensor"},
                                         {IlluminationRule::per_agent, "per_agent"}};
  return n;
}
inline const Names<StimulusMode>& names(StimulusMode) {
  static const Names<StimulusMode> n{{StimulusMode::positive, "positive"},
                                     {StimulusMode::negative, "negative"},
                                     {StimulusMode::alternating, "alternating"}};
  return n;
}
inline const Names<SeriesKind>& names(SeriesKind) {
  static const Names<SeriesKind> n{{SeriesKind::uniform, "uniform"}, {SeriesKind::skewed, "skewed"}};
  return n;
}

template <class E>
concept Named = requires(E e) { names(e); };

/// Reads fields out of a JSON object, remembering which keys were used so
/// that leftovers can be reported.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError(where() + " must be an object");
  }

  template <class T>
  void operator()(const char* key, T& out) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, out, path_.empty() ? key : path_ + "." + key);
  }

  template <class S>
  void section(const char* key, S& out) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, path_.empty() ? key : path_ + "." + key);
    fields(sub, out);
    sub.finish();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.contains(k)) throw InputError("unknown config key '" + qualified(k) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  std::string qualified(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  template <class T>
  static void read(const nlohmann::json& v, T& out, const std::string& key) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InputError("'" + key + "' must be a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InputError("'" + key + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
        } else if (v.get<long long>() < 0) {
          throw InputError("'" + key + "' must be non-negative");
        } else {
          out = static_cast<T>(v.get<long long>());
        }
      } else {
        out = v.get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InputError("'" + key + "' must be a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InputError("'" + key + "' must be a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw InputError("'" + key + "' must be an array of numbers");
      out.clear();
      for (const auto& e : v) {
        if (!e.is_number()) throw InputError("'" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
      }
    } else {
      static_assert(Named<T>);
      if (!v.is_string()) throw InputError("'" + key + "' must be a string");
      const std::string s = v.get<std::string>();
      for (const auto& [e, name] : names(T{}))
        if (s == name) {
          out = e;
          return;
        }
      std::string allowed;
      for (const auto& [e, name] : names(T{})) allowed += std::string(allowed.empty() ? "" : ", ") + name;
      throw InputError("'" + key + "' must be one of: " + allowed);
    }
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

/// Writes the same fields back out; used to record the effective config.
class Writer {
 public:
  template <class T>
  void operator()(const char* key, const T& v) {
    if constexpr (Named<T>) {
      for (const auto& [e, name] : names(T{}))
        if (e == v) j_[key] = name;
    } else {
      j_[key] = v;
    }
  }

  template <class S>
  void section(const char* key, const S& s) {
    Writer sub;
    fields(sub, const_cast<S&>(s));
    j_[key] = sub.j_;
  }

  nlohmann::json j_ = nlohmann::json::object();
};

inline void fields(auto& ar, SensorParams& s) {
  ar("offset", s.offset);
  ar("angle", s.angle);
  ar("rotation", s.rotation);
}

inline void fields(auto& ar, MotorMode& m) {
  ar("kind", m.kind);
  ar("reset_probability", m.reset_probability);
}

inline void fields(auto& ar, TurnoverPolicy& t) {
  ar("enabled", t.enabled);
  ar("frequency", t.frequency);
  ar("division_window", t.division_window);
  ar("division_min", t.division_min);
  ar("division_max", t.division_max);
  ar("division_local_min", t.division_local_min);
  ar("survival_window", t.survival_window);
  ar("survival_min", t.survival_min);
  ar("survival_max", t.survival_max);
}

inline void fields(auto& ar, SeriesEncoding& e) {
  ar("spacing", e.spacing);
  ar("stroke_width", e.stroke_width);
  ar("scale", e.scale);
  ar("margin", e.margin);
}

inline void fields(auto& ar, SpiralParams& s) {
  ar("growth", s.growth);
  ar("angle_step", s.angle_step);
}

inline void fields(auto& ar, Arena& a) {
  ar("width", a.width);
  ar("height", a.height);
  ar("margin", a.margin);
}

inline void fields(auto& ar, CentroidSpec& s) {
  ar("shape", s.shape);
  ar("mask_path", s.mask_path);
  ar("threshold", s.threshold);
  ar("runs", s.runs);
  CentroidRunConfig& r = s.run;
  ar("hold_steps", r.hold_steps);
  ar("schedule", r.schedule);
  ar("delay_steps", r.delay_steps);
  ar("p_remove", r.p_remove);
  ar("halt_population", r.halt_population);
  ar.section("sensors", r.sensors);
  ar("damping", r.damping);
  ar("projection_magnitude", r.projection_magnitude);
  ar("density", r.density);
  ar("margin", r.margin);
  ar("max_steps", r.max_steps);
  ar("order", r.order);
  ar("record_every", r.record_every);
  ar("seed", r.seed);
}

inline void fields(auto& ar, MeanSpec& s) {
  ar("data", s.data);
  ar("values", s.values);
  ar("count", s.count);
  ar("lo", s.lo);
  ar("hi", s.hi);
  ar("sorted", s.sorted);
  ar("runs", s.runs);
  MeanRunConfig& r = s.run;
  ar.section("encoding", r.encoding);
  ar("hold_steps", r.hold_steps);
  ar.section("turnover", r.turnover);
  ar("halt_population", r.halt_population);
  ar.section("sensors", r.sensors);
  ar("damping", r.damping);
  ar("projection_magnitude", r.projection_magnitude);
  ar("max_steps", r.max_steps);
  ar("order", r.order);
  ar("record_every", r.record_every);
  ar("seed", r.seed);
}

inline void fields(auto& ar, TrackSpec& s) {
  ar("runs", s.runs);
  TrackingRunConfig& r = s.run;
  ar.section("arena", r.arena);
  ar("population", r.population);
  ar("init_window", r.init_window);
  ar("mode", r.mode);
  ar("noise_sigma", r.noise_sigma);
  ar("update_period", r.update_period);
  ar("projection_duration", r.projection_duration);
  ar("alternation_period", r.alternation_period);
  ar("mask_size", r.mask_size);
  ar("illumination_weight", r.illumination_weight);
  ar("point_magnitude", r.point_magnitude);
  ar("point_radius", r.point_radius);
  ar.section("spiral", r.spiral);
  ar.section("motor", r.motor);
  ar.section("sensors", r.sensors);
  ar("damping", r.damping);
  ar("coalescence_steps", r.coalescence_steps);
  ar("max_steps", r.max_steps);
  ar("illumination", r.illumination);
  ar("order", r.order);
  ar("record_every", r.record_every);
  ar("seed", r.seed);
}

}  // namespace config_detail

template <class Spec>
Spec spec_from_json(const nlohmann::json& j) {
  Spec s;
  config_detail::Reader r(j, "");
  config_detail::fields(r, s);
  r.finish();
  return s;
}

template <class Spec>
nlohmann::json spec_to_json(const Spec& s) {
  config_detail::Writer w;
  config_detail::fields(w, const_cast<Spec&>(s));
  return w.j_;
}

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Expansion into per-run configurations

/// splitmix64 finaliser; gives independent streams from one run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Resolves the shape once; the result is reused for every run.
inline ShapeMask resolve_mask(const CentroidSpec& s) {
  if (!s.mask_path.empty()) {
    if (s.threshold < 0 || s.threshold > 255) throw InputError("threshold must lie in [0, 255]");
    return load_shape_mask(std::filesystem::path(s.mask_path), s.threshold);
  }
  return shapes::by_name(s.shape);
}

inline CentroidRunConfig centroid_run(const CentroidSpec& s, const ShapeMask& mask, std::uint64_t seed) {
  CentroidRunConfig c = s.run;
  c.mask = mask;
  c.seed = seed;
  return c;
}

inline MeanRunConfig mean_run(const MeanSpec& s, std::uint64_t seed) {
  MeanRunConfig c = s.run;
  c.seed = seed;
  if (!s.values.empty()) {
    c.series.values = s.values;
    c.series.lo = s.lo;
    c.series.hi = s.hi;
    for (double v : s.values)
      if (v < s.lo || v > s.hi) throw InputError("series value outside [lo, hi]");
  } else {
    Rng rng(derive_seed(seed, 1));
    c.series = s.data == SeriesKind::uniform ? gen_uniform_series(s.count, s.lo, s.hi, rng)
                                             : gen_skewed_series(s.count, rng);
  }
  if (s.sorted) c.series = sorted(std::move(c.series));
  return c;
}

inline TrackingRunConfig track_run(const TrackSpec& s, std::uint64_t seed) {
  TrackingRunConfig c = s.run;
  c.seed = seed;
  return c;
}

}  // namespace morpho
