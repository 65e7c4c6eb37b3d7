#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "experiments.hpp"
#include "image.hpp"
#include "world.hpp"

namespace morpho {

struct RunMetrics {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  double final_error = 0.0;
  long halt_step = 0;

  bool operator==(const RunMetrics&) const = default;
};

struct BatchSummary {
  std::size_t runs = 0;
  double mae = 0.0;
  double sigma = 0.0;  // population standard deviation (divide by n)
  std::optional<double> rho;
};

inline RunMetrics to_metrics(const CentroidResult& r, std::uint64_t seed) {
  return {"centroid", seed, r.trace, r.final_error, r.halt_step};
}

inline RunMetrics to_metrics(const MeanResult& r, std::uint64_t seed) {
  return {"mean", seed, r.trace, r.error_px, r.halt_step};
}

/// Tracking runs report the time-averaged error as their final error.
inline RunMetrics to_metrics(const TrackingResult& r, std::uint64_t seed) {
  RunMetrics m{"track", seed, {}, r.mean_error, r.halt_step};
  m.records.reserve(r.trace.size());
  for (const TrackingRecord& t : r.trace) m.records.push_back({t.step, t.blob, t.population, t.error});
  return m;
}

/// Sample Pearson correlation from centred sums (means first, then deviations).
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("pearson needs equal-length inputs");
  if (xs.size() < 2) throw InputError("pearson needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw EstimationError("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline BatchSummary aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw InputError("cannot aggregate an empty batch");
  BatchSummary s;
  s.runs = runs.size();
  const double n = static_cast<double>(runs.size());
  for (const RunMetrics& r : runs) s.mae += std::abs(r.final_error);
  s.mae /= n;
  double ss = 0.0;
  for (const RunMetrics& r : runs) {
    const double d = std::abs(r.final_error) - s.mae;
    ss += d * d;
  }
  s.sigma = std::sqrt(ss / n);
  return s;
}

inline BatchSummary aggregate(std::span<const RunMetrics> runs, std::span<const double> covariate) {
  BatchSummary s = aggregate(runs);
  std::vector<double> errs;
  errs.reserve(runs.size());
  for (const RunMetrics& r : runs) errs.push_back(std::abs(r.final_error));
  s.rho = pearson(covariate, errs);
  return s;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "step,blob_x,blob_y,population,error";

namespace detail {

inline void put_number(std::string& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

template <class T>
void put_integer(std::string& out, T v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

template <class T>
T parse_field(std::string_view s) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw InputError("bad CSV field '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Shortest round-trip formatting, so equal runs give identical bytes.
inline std::string to_csv(const RunMetrics& m) {
  std::string out;
  out += "# experiment ";
  out += m.experiment;
  out += " seed ";
  detail::put_integer(out, m.seed);
  out += " final_error ";
  detail::put_number(out, m.final_error);
  out += " halt_step ";
  detail::put_integer(out, m.halt_step);
  out += '\n';
  out += kCsvHeader;
  out += '\n';
  for (const TraceRecord& r : m.records) {
    detail::put_integer(out, r.step);
    out += ',';
    detail::put_number(out, r.blob.x);
    out += ',';
    detail::put_number(out, r.blob.y);
    out += ',';
    detail::put_integer(out, r.population);
    out += ',';
    detail::put_number(out, r.error);
    out += '\n';
  }
  return out;
}

inline void write_csv(const RunMetrics& m, std::ostream& os) {
  const std::string s = to_csv(m);
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!os) throw std::runtime_error("failed writing CSV");
}

inline void write_csv(const RunMetrics& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(m, os);
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path);
}

inline RunMetrics read_csv(std::istream& is) {
  RunMetrics m;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# experiment ", 0) != 0) throw InputError("missing CSV preamble");
  {
    std::istringstream pre(line.substr(2));
    std::string key, seed, err, halt;
    pre >> key >> m.experiment >> key >> seed >> key >> err >> key >> halt;
    if (!pre) throw InputError("bad CSV preamble");
    m.seed = detail::parse_field<std::uint64_t>(seed);
    m.final_error = detail::parse_field<double>(err);
    m.halt_step = detail::parse_field<long>(halt);
  }
  if (!std::getline(is, line) || line != kCsvHeader) throw InputError("missing CSV header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::string_view v(line);
    std::string_view f[5];
    for (int i = 0; i < 5; ++i) {
      const auto comma = v.find(',');
      if ((comma == std::string_view::npos) != (i == 4)) throw InputError("bad CSV row");
      f[i] = v.substr(0, comma);
      if (i < 4) v.remove_prefix(comma + 1);
    }
    m.records.push_back({detail::parse_field<long>(f[0]),
                         {detail::parse_field<double>(f[1]), detail::parse_field<double>(f[2])},
                         detail::parse_field<std::size_t>(f[3]),
                         detail::parse_field<double>(f[4])});
  }
  return m;
}

inline std::string summary_csv(std::span<const RunMetrics> runs, const BatchSummary& s) {
  std::string out = "# sigma is the population standard deviation (divide by n)\n";
  out += "seed,final_error,halt_step\n";
  for (const RunMetrics& r : runs) {
    detail::put_integer(out, r.seed);
    out += ',';
    detail::put_number(out, r.final_error);
    out += ',';
    detail::put_integer(out, r.halt_step);
    out += '\n';
  }
  out += "# runs ";
  detail::put_integer(out, s.runs);
  out += " mae ";
  detail::put_number(out, s.mae);
  out += " sigma ";
  detail::put_number(out, s.sigma);
  if (s.rho) {
    out += " rho ";
    detail::put_number(out, *s.rho);
  }
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Frames

inline constexpr std::uint8_t kParticleShade = 255;

/// Trail field clamped to 0..254 with particles drawn at 255.
inline GreyImage render_frame(const TrailField& field, const Population& pop) {
  GreyImage img(field.grid().width(), field.grid().height());
  const auto src = field.values();
  auto dst = img.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<std::uint8_t>(std::clamp(src[i], 0.0, 254.0));
  for (const Particle& p : pop.particles()) img[p.cell()] = kParticleShade;
  return img;
}

inline GreyImage render_frame(const World& w) { return render_frame(w.trail(), w.population()); }

}  // namespace morpho
