#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace morpho {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Cell containing a continuous position. Cell (i, j) spans [i, i+1) x [j, j+1).
inline Cell cell_of(double x, double y) {
  return {static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y))};
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline Point cell_center(Cell c) { return {c.x + 0.5, c.y + 0.5}; }

/// Dense row-major 2D array with fixed dimensions.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        values_(static_cast<std::size_t>(checked_area(width, height)), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) { return values_[index(x, y)]; }
  const T& operator()(int x, int y) const { return values_[index(x, y)]; }
  T& operator[](Cell c) { return values_[index(c.x, c.y)]; }
  const T& operator[](Cell c) const { return values_[index(c.x, c.y)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  void fill(const T& v) { std::fill(values_.begin(), values_.end(), v); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static long checked_area(int width, int height) {
    require(width > 0 && height > 0, "grid dimensions must be positive");
    return static_cast<long>(width) * height;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

}  // namespace morpho
