// morpho: batch runner for the centroid, mean and tracking experiments.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "morpho.hpp"

namespace fs = std::filesystem;
using namespace morpho;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out;
  std::string frames = "off";
};

long parse_frames(const std::string& s) {
  if (s == "off") return 0;
  std::size_t used = 0;
  long k = 0;
  try {
    k = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || k < 1) throw InputError("--frames takes a positive step count or 'off'");
  return k;
}

fs::path output_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("MORPHO_OUT_DIR"); env && *env) return env;
  return "morpho_out";
}

nlohmann::json config_json(const Options& o) {
  return o.config.empty() ? nlohmann::json::object() : load_json(o.config);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

ObserverFactory frame_writer(const fs::path& dir, long every) {
  if (every == 0) return {};
  return [dir, every](std::size_t, std::uint64_t seed) -> StepObserver {
    return [dir, every, seed](const World& w) {
      if (w.step_count() % every != 0) return;
      const fs::path p = dir / ("seed" + std::to_string(seed) + "_step" + std::to_string(w.step_count()) + ".pgm");
      write_pgm(p, render_frame(w));
    };
  };
}

void write_batch(const fs::path& dir, const BatchResult& b, const nlohmann::json& effective) {
  for (const RunMetrics& r : b.runs) write_csv(r, (dir / ("run_" + std::to_string(r.seed) + ".csv")).string());
  write_text(dir / "summary.csv", summary_csv(b.runs, b.summary));
  write_text(dir / "config.json", effective.dump(2) + "\n");
}

void report(const std::string& label, const BatchSummary& s) {
  std::cout << label << "runs " << s.runs << "  MAE " << s.mae << "  sigma " << s.sigma;
  if (s.rho) std::cout << "  rho " << *s.rho;
  std::cout << '\n';
}

/// Parses and fully validates a spec, so nothing is written for a bad config.
template <class Spec>
Spec checked_spec(const nlohmann::json& j, const Options& o) {
  Spec spec = spec_from_json<Spec>(j);
  if (o.seed) spec.run.seed = *o.seed;
  if (o.runs) spec.runs = *o.runs;
  if (spec.runs < 1) throw InputError("runs must be at least 1");
  if constexpr (std::is_same_v<Spec, CentroidSpec>) {
    validate(centroid_run(spec, resolve_mask(spec), spec.run.seed));
  } else if constexpr (std::is_same_v<Spec, MeanSpec>) {
    for (std::size_t i = 0; i < spec.runs; ++i) validate(mean_run(spec, run_seed(spec.run.seed, i)));
  } else {
    validate(track_run(spec, spec.run.seed));
  }
  return spec;
}

template <class Spec>
int run_experiment(const Options& o) {
  const Spec spec = checked_spec<Spec>(config_json(o), o);
  const long every = parse_frames(o.frames);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  if (every > 0) fs::create_directories(dir / "frames");
  const BatchResult b = run_batch(spec, spec.run.seed, spec.runs, frame_writer(dir / "frames", every));
  write_batch(dir, b, spec_to_json(spec));
  report("", b.summary);
  return 0;
}

template <class Spec>
std::vector<Spec> sweep_specs(const nlohmann::json& base, const std::string& param,
                              const nlohmann::json& values, const Options& o) {
  std::vector<Spec> specs;
  std::string path = "/" + param;
  std::replace(path.begin(), path.end(), '.', '/');
  const nlohmann::json::json_pointer ptr(path);
  for (const auto& v : values) {
    nlohmann::json j = base;
    j[ptr] = v;
    specs.push_back(checked_spec<Spec>(j, o));
  }
  return specs;
}

template <class Spec>
int run_sweep_of(const nlohmann::json& base, const std::string& param, const nlohmann::json& values,
                 const Options& o) {
  const std::vector<Spec> specs = sweep_specs<Spec>(base, param, values, o);
  const long every = parse_frames(o.frames);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  std::string table = "# sigma is the population standard deviation (divide by n)\nvalue,runs,mae,sigma\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string shown = values[i].is_string() ? values[i].get<std::string>() : values[i].dump();
    const std::string tag = param + "=" + shown;
    const fs::path sub = dir / tag;
    fs::create_directories(sub);
    if (every > 0) fs::create_directories(sub / "frames");
    const BatchResult b = run_batch(specs[i], specs[i].run.seed, specs[i].runs, frame_writer(sub / "frames", every));
    write_batch(sub, b, spec_to_json(specs[i]));
    report(tag + "  ", b.summary);
    table += shown + "," + std::to_string(b.summary.runs) + ",";
    detail::put_number(table, b.summary.mae);
    table += ",";
    detail::put_number(table, b.summary.sigma);
    table += "\n";
  }
  write_text(dir / "sweep.csv", table);
  return 0;
}

int run_sweep(const Options& o) {
  if (o.config.empty()) throw InputError("sweep needs --config");
  const nlohmann::json j = load_json(o.config);
  if (!j.is_object()) throw InputError("sweep config must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "experiment" && k != "parameter" && k != "values" && k != "base")
      throw InputError("unknown config key '" + k + "'");
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw InputError("sweep needs 'experiment'");
  if (!j.contains("parameter") || !j["parameter"].is_string()) throw InputError("sweep needs 'parameter'");
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
    throw InputError("sweep needs a non-empty 'values' array");
  const nlohmann::json base = j.value("base", nlohmann::json::object());
  const std::string exp = j["experiment"];
  const std::string param = j["parameter"];
  if (exp == "centroid") return run_sweep_of<CentroidSpec>(base, param, j["values"], o);
  if (exp == "mean") return run_sweep_of<MeanSpec>(base, param, j["values"], o);
  if (exp == "track") return run_sweep_of<TrackSpec>(base, param, j["values"], o);
  throw InputError("sweep experiment must be centroid, mean or track");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrinkage and tracking experiments on a virtual plasmodium"};
  app.require_subcommand(1);
  Options o;
  auto add_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config");
    sub->add_option("--seed", o.seed, "base seed; run i uses seed + i");
    sub->add_option("--runs", o.runs, "number of runs");
    sub->add_option("--out", o.out, "output directory (default $MORPHO_OUT_DIR or ./morpho_out)");
    sub->add_option("--frames", o.frames, "write a PGM frame every k steps, or 'off'");
  };
  CLI::App* centroid = app.add_subcommand("centroid", "centroid of a shape by shrinkage");
  CLI::App* mean = app.add_subcommand("mean", "arithmetic mean of a spatially encoded series");
  CLI::App* track = app.add_subcommand("track", "tracking a target moving along a spiral");
  CLI::App* sweep = app.add_subcommand("sweep", "batch over a list of values for one parameter");
  for (CLI::App* s : {centroid, mean, track, sweep}) add_flags(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*centroid) return run_experiment<CentroidSpec>(o);
    if (*mean) return run_experiment<MeanSpec>(o);
    if (*track) return run_experiment<TrackSpec>(o);
    return run_sweep(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
