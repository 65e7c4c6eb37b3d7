#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <queue>
#include <vector>

#include "agent.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace morpho {

/// Binary shape on a lattice; a cell is either inside or not.
struct ShapeMask {
  Grid<std::uint8_t> inside;

  ShapeMask() = default;
  ShapeMask(int width, int height) : inside(width, height, 0) {}

  int width() const { return inside.width(); }
  int height() const { return inside.height(); }
  bool contains(int x, int y) const { return inside.in_bounds(x, y) && inside(x, y) != 0; }
  void set(int x, int y, bool v = true) {
    if (inside.in_bounds(x, y)) inside(x, y) = v ? 1 : 0;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(inside.values().begin(), inside.values().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  }

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (int y = 0; y < height(); ++y)
      for (int x = 0; x < width(); ++x)
        if (inside(x, y)) out.push_back({x, y});
    return out;
  }

  /// Copy surrounded by an empty border `margin` cells wide.
  ShapeMask padded(int margin) const {
    ShapeMask out(width() + 2 * margin, height() + 2 * margin);
    for (int y = 0; y < height(); ++y)
      for (int x = 0; x < width(); ++x) out.inside(x + margin, y + margin) = inside(x, y);
    return out;
  }

  GreyImage to_image() const {
    GreyImage img(width(), height());
    auto src = inside.values();
    auto dst = img.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
    return img;
  }
};

/// inside = (pixel >= threshold). An image with no inside pixels is rejected.
inline ShapeMask load_shape_mask(const GreyImage& image, int threshold = 128) {
  if (image.size() == 0) throw InputError("empty image");
  if (threshold < 0 || threshold > 255) throw InputError("threshold must lie in 0..255");
  ShapeMask m(image.width(), image.height());
  auto src = image.values();
  auto dst = m.inside.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= threshold ? 1 : 0;
  if (m.count() == 0) throw InputError("shape mask has no inside cells");
  return m;
}

inline ShapeMask load_shape_mask(const std::filesystem::path& path, int threshold = 128) {
  return load_shape_mask(read_pgm(path), threshold);
}

/// Mean of inside-cell indices, so a 3x3 block at the origin gives (1, 1).
/// Add 0.5 per axis to compare with continuous particle positions.
inline Point image_centroid(const ShapeMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.inside(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
  if (n == 0) throw InputError("centroid of an empty mask");
  return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

/// Mean continuous particle position.
inline Point blob_centroid(const std::vector<Particle>& particles) {
  if (particles.empty()) throw EstimationError("centroid of an empty population");
  double sx = 0.0, sy = 0.0;
  for (const Particle& p : particles) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(particles.size());
  return {sx / n, sy / n};
}

inline Point blob_centroid(const Population& pop) { return blob_centroid(pop.particles()); }

/// Number of 4-connected components of the inside cells.
inline std::size_t count_components(const ShapeMask& mask) {
  Grid<std::uint8_t> seen(mask.width(), mask.height(), 0);
  std::size_t components = 0;
  std::queue<Cell> frontier;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.inside(x, y) || seen(x, y)) continue;
      ++components;
      seen(x, y) = 1;
      frontier.push({x, y});
      while (!frontier.empty()) {
        const Cell c = frontier.front();
        frontier.pop();
        constexpr int dx[] = {1, -1, 0, 0};
        constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = c.x + dx[k], ny = c.y + dy[k];
          if (mask.contains(nx, ny) && !seen(nx, ny)) {
            seen(nx, ny) = 1;
            frontier.push({nx, ny});
          }
        }
      }
    }
  return components;
}

// ---------------------------------------------------------------------------
// 1D data series encoded as a thick polyline.

struct DataSeries {
  std::vector<double> values;
  double lo = 0.0;
  double hi = 100.0;
  bool sorted = false;
};

inline DataSeries gen_uniform_series(std::size_t n, double lo, double hi, Rng& rng) {
  require(n >= 2, "series needs at least two values");
  require(lo < hi, "series domain must satisfy lo < hi");
  DataSeries s{{}, lo, hi, false};
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(std::clamp(rng.uniform(lo, hi), lo, hi));
  return s;
}

/// Heavy upper cluster: [80, 100] with probability 0.9, else [0, 20].
inline DataSeries gen_skewed_series(std::size_t n, Rng& rng) {
  require(n >= 2, "series needs at least two values");
  DataSeries s{{}, 0.0, 100.0, false};
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = rng.bernoulli(0.9);
    s.values.push_back(high ? rng.uniform(80.0, 100.0) : rng.uniform(0.0, 20.0));
  }
  return s;
}

inline DataSeries sorted(DataSeries s) {
  std::sort(s.values.begin(), s.values.end());
  s.sorted = true;
  return s;
}

inline double arithmetic_mean(const std::vector<double>& values) {
  if (values.empty()) throw EstimationError("mean of an empty series");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline double arithmetic_mean(const DataSeries& s) { return arithmetic_mean(s.values); }

inline double population_stddev(const std::vector<double>& values) {
  const double m = arithmetic_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

/// Value i sits at x = margin + i * spacing and y = margin + (hi - v) * scale,
/// so larger values lie nearer the top row.
struct SeriesEncoding {
  double spacing = 20.0;
  double stroke_width = 6.0;
  double scale = 1.0;   // pixels per value unit
  double margin = 24.0;

  void validate() const {
    if (spacing <= 0.0) throw InputError("series spacing must be positive");
    if (stroke_width < 1.0) throw InputError("stroke width must be at least 1 pixel");
    if (scale <= 0.0) throw InputError("series scale must be positive");
    if (margin < 0.0) throw InputError("series margin must be non-negative");
  }

  double row_of(double value, double hi) const { return margin + (hi - value) * scale; }
  double value_of(double row, double hi) const { return hi - (row - margin) / scale; }
  double column_of(std::size_t i) const { return margin + static_cast<double>(i) * spacing; }

  int lattice_width(const DataSeries& s) const {
    return static_cast<int>(std::ceil(2.0 * margin + static_cast<double>(s.values.size() - 1) * spacing));
  }
  int lattice_height(const DataSeries& s) const {
    return static_cast<int>(std::ceil(2.0 * margin + (s.hi - s.lo) * scale));
  }
};

inline std::vector<Point> series_points(const DataSeries& s, const SeriesEncoding& enc) {
  std::vector<Point> pts;
  pts.reserve(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    pts.push_back({enc.column_of(i), enc.row_of(s.values[i], s.hi)});
  return pts;
}

inline double distance_to_segment(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Marks every cell whose centre lies within width/2 of segment ab.
inline void stroke_segment(ShapeMask& mask, Point a, Point b, double width) {
  const double r = width / 2.0;
  const int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) - r));
  const int x1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + r));
  const int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) - r));
  const int y1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + r));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (distance_to_segment(cell_center({x, y}), a, b) <= r) mask.set(x, y);
}

/// Rasterizes the series as consecutive points joined by thick straight
/// segments, on a lattice sized from the encoding.
inline ShapeMask encode_series(const DataSeries& s, const SeriesEncoding& enc) {
  enc.validate();
  if (s.values.size() < 2) throw InputError("series needs at least two values");
  if (!(s.lo < s.hi)) throw InputError("series domain must satisfy lo < hi");
  const int w = enc.lattice_width(s);
  const int h = enc.lattice_height(s);
  const auto pts = series_points(s, enc);
  const double r = enc.stroke_width / 2.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = s.values[i];
    if (v < s.lo || v > s.hi) throw InputError("series value outside its domain");
    const Point p = pts[i];
    if (p.x - r < 0.0 || p.y - r < 0.0 || p.x + r > w || p.y + r > h)
      throw InputError("encoded series does not fit the lattice");
  }
  ShapeMask mask(w, h);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) stroke_segment(mask, pts[i], pts[i + 1], enc.stroke_width);
  return mask;
}

}  // namespace morpho
