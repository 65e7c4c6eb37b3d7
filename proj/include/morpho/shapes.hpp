#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

// Procedural test shapes. Everything is drawn by testing cell centres.
namespace morpho::shapes {

inline void fill_ellipse(ShapeMask& m, Point c, double rx, double ry, double angle_deg = 0.0) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  const double reach = std::max(rx, ry);
  for (int y = static_cast<int>(c.y - reach) - 1; y <= static_cast<int>(c.y + reach) + 1; ++y)
    for (int x = static_cast<int>(c.x - reach) - 1; x <= static_cast<int>(c.x + reach) + 1; ++x) {
      const Point p = cell_center({x, y});
      const double dx = p.x - c.x, dy = p.y - c.y;
      const double u = (dx * ca + dy * sa) / rx;
      const double v = (-dx * sa + dy * ca) / ry;
      if (u * u + v * v <= 1.0) m.set(x, y);
    }
}

inline void fill_disc(ShapeMask& m, Point c, double r) { fill_ellipse(m, c, r, r); }

inline void clear_disc(ShapeMask& m, Point c, double r) {
  for (int y = static_cast<int>(c.y - r) - 1; y <= static_cast<int>(c.y + r) + 1; ++y)
    for (int x = static_cast<int>(c.x - r) - 1; x <= static_cast<int>(c.x + r) + 1; ++x)
      if (distance(cell_center({x, y}), c) <= r) m.set(x, y, false);
}

/// Thick polyline whose width tapers linearly from w0 to w1.
inline void tapered_polyline(ShapeMask& m, const std::vector<Point>& pts, double w0, double w1) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double t0 = static_cast<double>(i) / static_cast<double>(pts.size() - 1);
    const double t1 = static_cast<double>(i + 1) / static_cast<double>(pts.size() - 1);
    const double wa = w0 + (w1 - w0) * t0;
    const double wb = w0 + (w1 - w0) * t1;
    stroke_segment(m, pts[i], pts[i + 1], std::max(wa, wb));
    fill_disc(m, pts[i + 1], wb / 2.0);
  }
}

/// Filled annular sector: radii [r_in, r_out], angles [a0, a1] degrees.
inline void fill_arc(ShapeMask& m, Point c, double r_in, double r_out, double a0, double a1) {
  for (int y = static_cast<int>(c.y - r_out) - 1; y <= static_cast<int>(c.y + r_out) + 1; ++y)
    for (int x = static_cast<int>(c.x - r_out) - 1; x <= static_cast<int>(c.x + r_out) + 1; ++x) {
      const Point p = cell_center({x, y});
      const double d = distance(p, c);
      if (d < r_in || d > r_out) continue;
      double ang = std::atan2(p.y - c.y, p.x - c.x) * 180.0 / std::numbers::pi;
      if (ang < 0.0) ang += 360.0;
      const bool in = a0 <= a1 ? (ang >= a0 && ang <= a1) : (ang >= a0 || ang <= a1);
      if (in) m.set(x, y);
    }
}

inline ShapeMask disc(double r = 38.0) {
  const int side = static_cast<int>(std::ceil(2.0 * r)) + 4;
  ShapeMask m(side, side);
  fill_disc(m, {side / 2.0, side / 2.0}, r);
  return m;
}

inline ShapeMask square(int side = 64) {
  ShapeMask m(side + 4, side + 4);
  for (int y = 2; y < side + 2; ++y)
    for (int x = 2; x < side + 2; ++x) m.set(x, y);
  return m;
}

/// Disc with a central hole.
inline ShapeMask ring(double r_out = 44.0, double r_in = 16.0) {
  ShapeMask m = disc(r_out);
  clear_disc(m, {m.width() / 2.0, m.height() / 2.0}, r_in);
  return m;
}

/// Thick 270-degree arc opening to the right. Its centroid falls in the
/// empty interior, outside the shape.
inline ShapeMask crescent(double r_out = 56.0, double r_in = 36.0) {
  const int side = static_cast<int>(std::ceil(2.0 * r_out)) + 4;
  ShapeMask m(side, side);
  fill_arc(m, {side / 2.0, side / 2.0}, r_in, r_out, 45.0, 315.0);
  return m;
}

/// Top-down lizard: elliptical body and head, four bent legs and a long
/// tapering curved tail.
inline ShapeMask lizard() {
  ShapeMask m(230, 150);
  fill_ellipse(m, {118, 74}, 40, 17);            // body
  fill_ellipse(m, {170, 73}, 17, 11);            // head
  stroke_segment(m, {150, 73}, {160, 73}, 16);   // neck
  // legs: shoulder -> elbow -> foot
  tapered_polyline(m, {{140, 64}, {150, 44}, {164, 36}}, 9, 6);
  tapered_polyline(m, {{140, 84}, {150, 104}, {164, 112}}, 9, 6);
  tapered_polyline(m, {{94, 64}, {84, 43}, {70, 35}}, 9, 6);
  tapered_polyline(m, {{94, 84}, {84, 105}, {70, 113}}, 9, 6);
  // tail curls down and back
  tapered_polyline(m, {{82, 76}, {60, 80}, {42, 88}, {28, 102}, {22, 120}, {28, 136}}, 14, 5);
  return m;
}

inline std::vector<std::string> names() { return {"disc", "square", "ring", "crescent", "lizard"}; }

inline ShapeMask by_name(const std::string& name) {
  if (name == "disc") return disc();
  if (name == "square") return square();
  if (name == "ring") return ring();
  if (name == "crescent") return crescent();
  if (name == "lizard") return lizard();
  throw InputError("unknown built-in shape '" + name + "'");
}

}  // namespace morpho::shapes
