#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gradeloc/error.hpp"

namespace gradeloc {

// Absolute slack for closed-ball membership tests, in meters.
inline constexpr double kRangeTolerance = 1e-9;

// Field coordinates in meters. x grows to the right, y grows downward
// (the walk starts at the top-left corner and heads to the bottom-right).
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2D operator*(double s, Point2D a) { return {s * a.x, s * a.y}; }
  Point2D& operator+=(Point2D o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend constexpr bool operator==(Point2D, Point2D) = default;
};

inline double norm(Point2D v) { return std::hypot(v.x, v.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }
inline bool is_finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Closed-ball membership with absolute tolerance.
inline bool within_range(Point2D a, Point2D b, double range) {
  return distance(a, b) <= range + kRangeTolerance;
}

inline double cross(Point2D o, Point2D a, Point2D b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// True iff some triple of `points` spans a non-degenerate triangle.
// `area_tol` is compared against |cross|, so pass something scaled by L^2.
inline bool has_three_noncollinear(std::span<const Point2D> points, double area_tol) {
  const std::size_t n = points.size();
  if (n < 3) return false;
  // Fix the first point and the farthest point from it; any third point off
  // that line is a witness. If all points lie on it they are collinear.
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = distance(points[0], points[i]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i == far) continue;
    if (std::abs(cross(points[0], points[far], points[i])) > area_tol) return true;
  }
  return false;
}

// Rectangular lattice of reference nodes. Node (row, col) sits at
// origin + (col * L, row * L); nodes are numbered row-major.
struct GridConfig {
  std::size_t rows = 5;
  std::size_t cols = 5;
  double cell_side = 75.0;
  Point2D origin{};

  void validate() const {
    if (rows < 2 || cols < 2) throw ConfigError("grid needs at least 2 rows and 2 columns");
    if (!(cell_side > 0.0) || !std::isfinite(cell_side))
      throw ConfigError("grid cell side must be a positive finite length");
    if (!is_finite(origin)) throw ConfigError("grid origin must be finite");
  }

  std::size_t node_count() const { return rows * cols; }
  double width() const { return static_cast<double>(cols - 1) * cell_side; }
  double height() const { return static_cast<double>(rows - 1) * cell_side; }
  Point2D max_corner() const { return origin + Point2D{width(), height()}; }

  Point2D node(std::size_t row, std::size_t col) const {
    return origin + Point2D{static_cast<double>(col) * cell_side,
                            static_cast<double>(row) * cell_side};
  }
};

inline std::vector<Point2D> grid_positions(const GridConfig& cfg) {
  cfg.validate();
  std::vector<Point2D> out;
  out.reserve(cfg.node_count());
  for (std::size_t r = 0; r < cfg.rows; ++r)
    for (std::size_t c = 0; c < cfg.cols; ++c) out.push_back(cfg.node(r, c));
  return out;
}

// Reference nodes within closed range of `at`.
inline std::vector<Point2D> nodes_in_range(std::span<const Point2D> nodes, Point2D at, double range) {
  std::vector<Point2D> out;
  for (const auto& n : nodes)
    if (within_range(n, at, range)) out.push_back(n);
  return out;
}

}  // namespace gradeloc
