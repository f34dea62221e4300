#pragma once

// Closed-form deployment planning for a square beaconing grid: required NTL
// range, beacon/centroid timing, the two-region coarse error model, and the
// brute-force geometric checks that back those closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/rng.hpp"

namespace gradeloc {

inline constexpr double kHalfSqrt5 = 1.1180339887498949;  // sqrt(5) / 2

// Smallest NTL range that keeps three non-collinear grid nodes one hop away
// from every point of a cell: the distance from an edge midpoint to the far
// corners of the cell, L * sqrt(5) / 2.
inline double min_ntl_range(double cell_side) {
  if (!(cell_side > 0.0)) throw DomainError("cell side must be > 0");
  return cell_side * kHalfSqrt5;
}

// The same bound rounded up to a whole meter (83.85 m -> 84 m for L = 75 m).
inline double min_ntl_range_rounded(double cell_side) {
  return std::ceil(min_ntl_range(cell_side) - 1e-9);
}

struct TimingPlan {
  double centroid_interval_raw = 0.0;  // P before rounding, seconds
  double centroid_interval = 10.0;     // P, seconds
  double beacon_interval = 1.0;        // p, seconds
  double granularity = 0.1;            // G = p / P
  std::size_t max_beacons = 10;        // P / p
  double threshold = 0.9;              // T
  double speed = 1.0;                  // S, m/s

  // Minimum beacon count for a node to become a candidate: ceil(T * maxBeacons).
  std::size_t threshold_count() const {
    return static_cast<std::size_t>(std::ceil(threshold * static_cast<double>(max_beacons) - 1e-9));
  }
};

// P_raw = (sqrt(5)/2 - 1) * L / S, i.e. the corner-disk radius crossed at full
// speed. P is then the smallest p * maxBeacons >= P_raw with p a whole number
// of seconds and maxBeacons = 1 / G.
inline TimingPlan derive_timing(double cell_side, double speed, double target_granularity,
                                double threshold) {
  if (!(cell_side > 0.0)) throw DomainError("cell side must be > 0");
  if (!(speed > 0.0)) throw DomainError("speed must be > 0");
  if (!(target_granularity > 0.0 && target_granularity <= 1.0))
    throw DomainError("granularity must lie in (0, 1]");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in (0, 1]");

  const double inv = 1.0 / target_granularity;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9 * inv)
    throw PlanningError("granularity " + std::to_string(target_granularity) +
                        " is not 1/n for an integer n; no whole-second p gives p/P = G");

  TimingPlan plan;
  plan.speed = speed;
  plan.threshold = threshold;
  plan.granularity = target_granularity;
  plan.max_beacons = static_cast<std::size_t>(n);
  plan.centroid_interval_raw = (kHalfSqrt5 - 1.0) * cell_side / speed;
  const double p = std::max(1.0, std::ceil(plan.centroid_interval_raw / n - 1e-9));
  plan.beacon_interval = p;
  plan.centroid_interval = p * n;
  return plan;
}

// Upper bound on fineCntLimit: the centroid cannot stay unchanged for longer
// than it takes to cross the central disk, 2 * r1 / (P * S) intervals.
inline std::size_t fine_cnt_limit_bound(double r1, double centroid_interval, double speed) {
  if (!(r1 > 0.0 && centroid_interval > 0.0 && speed > 0.0))
    throw DomainError("r1, P and S must all be > 0");
  const double ratio = 2.0 * r1 / (centroid_interval * speed);
  if (ratio < 1.0 - 1e-12)
    throw PlanningError("2*r1/(P*S) = " + std::to_string(ratio) +
                        " < 1: no valid fineCntLimit; increase r1 (cell side) or shorten P");
  return static_cast<std::size_t>(std::floor(ratio + 1e-9));
}

// Central disk C(I, r1) and the four corner quarter-disks C(corner, r2).
struct RegionModel {
  double cell_side = 0.0;
  double range = 0.0;
  double r1 = 0.0;  // L / 2
  double r2 = 0.0;  // R - L

  static RegionModel make(double cell_side, double range) {
    if (!(cell_side > 0.0)) throw DomainError("cell side must be > 0");
    if (range < cell_side - kRangeTolerance)
      throw DomainError("range R < L: grid nodes cannot reach their neighbours");
    RegionModel m{cell_side, range, cell_side / 2.0, std::max(0.0, range - cell_side)};
    if (m.r2 > m.r1) throw DomainError("R - L exceeds L / 2; corner disks would swallow the centre");
    return m;
  }

  // r1 + r2 < L / sqrt(2) keeps the centre disk clear of every corner disk.
  bool regions_disjoint() const { return r1 + r2 < cell_side * std::numbers::sqrt2 / 2.0; }
};

inline bool within_model_band(double cell_side, double range) {
  return range >= cell_side - kRangeTolerance && range <= min_ntl_range(cell_side) + kRangeTolerance;
}

// Mean distance to the region centre over the two regions, weighted by area:
// (2/3) (r1^3 + r2^3) / (r1^2 + r2^2). Values for R > L*sqrt(5)/2 are returned
// but fall outside the model's validity band (see within_model_band).
inline double theoretical_mae(double cell_side, double range) {
  const auto m = RegionModel::make(cell_side, range);
  const double num = std::pow(m.r1, 3) + std::pow(m.r2, 3);
  const double den = m.r1 * m.r1 + m.r2 * m.r2;
  return 2.0 / 3.0 * num / den;
}

inline double region_area_fraction(double cell_side, double range) {
  const auto m = RegionModel::make(cell_side, range);
  return std::numbers::pi * (m.r1 * m.r1 + m.r2 * m.r2) / (cell_side * cell_side);
}

enum class Corner { A, B, C, D };  // A top-left, B top-right, C bottom-right, D bottom-left

struct RegionHit {
  enum class Kind { Region1, Region2, Other } kind = Kind::Other;
  Corner corner = Corner::A;  // meaningful for Region2 only
  Point2D center{};           // region centre (I or the corner); the model's estimate

  bool operator==(const RegionHit&) const = default;
};

inline std::array<Point2D, 4> cell_corners(Point2D anchor, double side) {
  return {anchor, anchor + Point2D{side, 0.0}, anchor + Point2D{side, side}, anchor + Point2D{0.0, side}};
}

// `anchor` is the cell's top-left corner A.
inline RegionHit region_classify(Point2D p, const RegionModel& model, Point2D anchor) {
  if (!model.regions_disjoint()) throw DomainError("region model parameters make regions overlap");
  const double L = model.cell_side;
  const Point2D rel = p - anchor;
  if (rel.x < -kRangeTolerance || rel.y < -kRangeTolerance || rel.x > L + kRangeTolerance ||
      rel.y > L + kRangeTolerance)
    throw DomainError("point lies outside the cell");

  const Point2D centre = anchor + Point2D{L / 2.0, L / 2.0};
  if (within_range(p, centre, model.r1)) return {RegionHit::Kind::Region1, Corner::A, centre};
  const auto corners = cell_corners(anchor, L);
  for (std::size_t i = 0; i < corners.size(); ++i)
    if (within_range(p, corners[i], model.r2))
      return {RegionHit::Kind::Region2, static_cast<Corner>(i), corners[i]};
  return {};
}

struct ConnectivityGraph {
  static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

  std::vector<std::vector<std::size_t>> adjacency;
  std::vector<std::size_t> hops;  // BFS hop count from gateway, kUnreachable if none
  std::size_t gateway = 0;
  bool connected = false;

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adjacency) twice += a.size();
    return twice / 2;
  }
  bool adjacent(std::size_t a, std::size_t b) const {
    return std::find(adjacency[a].begin(), adjacency[a].end(), b) != adjacency[a].end();
  }
};

// Unit-disk graph over `positions`: an edge for every pair within closed range.
inline ConnectivityGraph connectivity_graph(std::span<const Point2D> positions, double range,
                                            std::size_t gateway = 0) {
  if (positions.empty()) throw DomainError("connectivity graph needs at least one node");
  if (!(range > 0.0)) throw DomainError("range must be > 0");
  if (gateway >= positions.size()) throw DomainError("gateway index out of range");

  const std::size_t n = positions.size();
  ConnectivityGraph g;
  g.gateway = gateway;
  g.adjacency.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (within_range(positions[i], positions[j], range)) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
      }

  g.hops.assign(n, ConnectivityGraph::kUnreachable);
  g.hops[gateway] = 0;
  std::queue<std::size_t> frontier;
  frontier.push(gateway);
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : g.adjacency[u])
      if (g.hops[v] == ConnectivityGraph::kUnreachable) {
        g.hops[v] = g.hops[u] + 1;
        ++reached;
        frontier.push(v);
      }
  }
  g.connected = reached == n;
  return g;
}

struct CoverageResult {
  bool ok = true;
  Point2D worst_point{};       // first failing point, or the point with fewest anchors
  std::size_t anchors_found = 0;  // nodes within range of worst_point
  std::size_t points_checked = 0;
  std::size_t failures = 0;
};

// Samples one interior cell [0, L]^2 (plus its corners, edge midpoints and
// centre, where the bound is tight) and checks every point sees three
// non-collinear lattice nodes within closed range R. The cell is surrounded
// by a full ring of neighbouring nodes, as in the middle of a large grid.
inline CoverageResult verify_three_anchor_coverage(double cell_side, double range, std::size_t samples,
                                                   std::uint64_t seed) {
  if (!(cell_side > 0.0) || !(range > 0.0)) throw DomainError("cell side and range must be > 0");
  if (samples < 1000) throw DomainError("coverage check needs at least 1000 samples");

  const double L = cell_side;
  std::vector<Point2D> nodes;
  for (int j = -1; j <= 2; ++j)
    for (int i = -1; i <= 2; ++i) nodes.push_back({i * L, j * L});

  std::vector<Point2D> witnesses = {{0, 0},     {L, 0},     {L, L},     {0, L},    {L / 2, 0},
                                    {L, L / 2}, {L / 2, L}, {0, L / 2}, {L / 2, L / 2}};

  CoverageResult res;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  const double area_tol = 1e-9 * L * L;
  auto check = [&](Point2D p) {
    const auto anchors = nodes_in_range(nodes, p, range);
    ++res.points_checked;
    const bool pass = has_three_noncollinear(anchors, area_tol);
    if (!pass) {
      if (res.ok) {
        res.worst_point = p;
        res.anchors_found = anchors.size();
      }
      res.ok = false;
      ++res.failures;
    } else if (res.ok && anchors.size() < fewest) {
      fewest = anchors.size();
      res.worst_point = p;
      res.anchors_found = anchors.size();
    }
  };

  for (auto w : witnesses) check(w);
  Rng rng(seed, "coverage");
  for (std::size_t k = 0; k < samples; ++k) check({rng.uniform(0.0, L), rng.uniform(0.0, L)});
  return res;
}

// Independent estimate of theoretical_mae: rejection-sample the cell, keep
// points that fall in Region 1 or Region 2 and average their distance to the
// region centre. `samples` counts draws in the square.
inline double monte_carlo_analytical_mae(double cell_side, double range, std::size_t samples,
                                         std::uint64_t seed) {
  if (samples < 100000) throw DomainError("Monte Carlo estimate needs at least 1e5 samples");
  const auto model = RegionModel::make(cell_side, range);
  Rng rng(seed, "mc-mae");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Point2D p{rng.uniform(0.0, cell_side), rng.uniform(0.0, cell_side)};
    const auto hit = region_classify(p, model, {0.0, 0.0});
    if (hit.kind == RegionHit::Kind::Other) continue;
    sum += distance(p, hit.center);
    ++hits;
  }
  return hits ? sum / static_cast<double>(hits) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace gradeloc
