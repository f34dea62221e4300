#pragma once

// The node-to-be-localized (NTL) state machine: threshold candidate
// selection, centroid estimation, the fine-grained fix trigger (centroid
// change or fineCntLimit unchanged intervals) and dead-reckoning between
// fixes.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/mobility.hpp"
#include "gradeloc/radio.hpp"
#include "gradeloc/rng.hpp"

namespace gradeloc {

struct NtlProfile {
  bool coarse_grained = true;
  bool fine_grained = false;
  bool self_localize = false;
  std::size_t fine_cnt_limit = 100;
  double threshold = 0.9;
  std::size_t max_beacons = 10;
  Millis centroid_interval = 10000;

  static NtlProfile coarse() { return {true, false, false}; }
  static NtlProfile fine(std::size_t limit) { return {true, true, false, limit}; }
  static NtlProfile extra_fine(std::size_t limit) { return {true, true, true, limit}; }

  void validate() const {
    if (self_localize && !fine_grained)
      throw ConfigError("self-localization requires fine-grained localization to remove the initial error");
    if (fine_cnt_limit < 1) throw ConfigError("fineCntLimit must be >= 1");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold T must lie in (0, 1]");
    if (max_beacons < 1) throw ConfigError("maxBeacons must be >= 1");
    if (centroid_interval <= 0) throw ConfigError("centroid interval must be > 0");
  }

  std::size_t threshold_count() const {
    return static_cast<std::size_t>(std::ceil(threshold * static_cast<double>(max_beacons) - 1e-9));
  }
};

struct TdoaErrorModel {
  double qmin = 1.0;
  double qmax = 5.0;

  void validate() const {
    if (!(qmin >= 0.0 && qmin <= qmax)) throw ConfigError("TDOA error bounds must satisfy 0 <= qmin <= qmax");
  }
};

enum class EstimateMethod { None, Coarse, Fine, DeadReckoned };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::Coarse: return "coarse";
    case EstimateMethod::Fine: return "fine";
    case EstimateMethod::DeadReckoned: return "dead_reckoned";
    case EstimateMethod::None: break;
  }
  return "none";
}

struct LocationEstimate {
  Point2D pos{};
  EstimateMethod method = EstimateMethod::None;
  Millis time = 0;
};

struct Fix {
  Point2D pos{};
  Millis time = 0;
};

struct NtlState {
  std::optional<std::vector<std::size_t>> last_candidates;  // identity of the last centroid
  std::optional<Point2D> last_centroid;
  std::size_t unchanged_count = 0;
  std::optional<Fix> last_fix;
  Point2D dead_reckon_offset{};
  std::size_t dead_reckon_steps = 0;
  std::size_t fgl_count = 0;
  std::size_t fgl_unavailable = 0;  // requests that found fewer than three usable anchors
  bool coarse_fallback = false;
};

// Ids of nodes whose count reaches ceil(T * maxBeacons), ascending.
inline std::vector<std::size_t> candidate_ids(const BeaconTally& tally, const NtlProfile& profile) {
  const auto need = profile.threshold_count();
  std::vector<std::size_t> ids;
  for (const auto& [id, n] : tally.counts)
    if (n >= need) ids.push_back(id);
  return ids;
}

inline std::vector<Point2D> candidate_set(const BeaconTally& tally, const NtlProfile& profile,
                                          std::span<const Point2D> node_positions) {
  std::vector<Point2D> out;
  for (auto id : candidate_ids(tally, profile)) {
    if (id >= node_positions.size()) throw ContractViolation("tally names an unknown node");
    out.push_back(node_positions[id]);
  }
  return out;
}

// nullopt signals "no candidates"; the caller keeps its previous estimate.
inline std::optional<Point2D> centroid(std::span<const Point2D> points) {
  if (points.empty()) return std::nullopt;
  Point2D sum{};
  for (auto p : points) sum += p;
  return (1.0 / static_cast<double>(points.size())) * sum;
}

// Stochastic stand-in for a TDOA solve: each axis is off by a magnitude drawn
// from U[qmin, qmax] with an independent random sign. Draw order: ex, ey, sx, sy.
inline Point2D tdoa_fix(Point2D actual, const TdoaErrorModel& model, Rng& rng) {
  const double ex = rng.uniform(model.qmin, model.qmax);
  const double ey = rng.uniform(model.qmin, model.qmax);
  const double sx = rng.coin() ? 1.0 : -1.0;
  const double sy = rng.coin() ? 1.0 : -1.0;
  return actual + Point2D{sx * ex, sy * ey};
}

// Everything ntl_update needs to know about the infrastructure.
struct LocalizationContext {
  std::span<const Point2D> nodes;
  double ntl_range = 84.0;
  double cell_side = 75.0;
  TdoaErrorModel tdoa{};

  // Three non-collinear REFN1 nodes within one hop of `at`.
  bool fine_available(Point2D at) const {
    const auto anchors = nodes_in_range(nodes, at, ntl_range);
    return has_three_noncollinear(anchors, 1e-9 * cell_side * cell_side);
  }
};

// What the NTL advertises right now given its state.
inline LocationEstimate current_estimate(const NtlState& s, const NtlProfile& profile, Millis now) {
  if (profile.fine_grained) {
    if (s.last_fix) {
      if (profile.self_localize && s.dead_reckon_steps > 0)
        return {s.last_fix->pos + s.dead_reckon_offset, EstimateMethod::DeadReckoned, now};
      return {s.last_fix->pos, EstimateMethod::Fine, now};
    }
    if ((profile.coarse_grained || s.coarse_fallback) && s.last_centroid)
      return {*s.last_centroid, EstimateMethod::Coarse, now};
    return {{}, EstimateMethod::None, now};
  }
  if (profile.coarse_grained && s.last_centroid) return {*s.last_centroid, EstimateMethod::Coarse, now};
  return {{}, EstimateMethod::None, now};
}

struct UpdateResult {
  NtlState state;
  LocationEstimate estimate;
  bool fired_fgl = false;
};

// One centroid-computation step, called once per interval P.
inline UpdateResult ntl_update(NtlState state, const BeaconTally& tally, Point2D actual, const NtlProfile& profile,
                               const LocalizationContext& ctx, Rng& rng, Millis now) {
  UpdateResult out;
  const auto ids = candidate_ids(tally, profile);
  if (ids.empty()) {
    out.estimate = current_estimate(state, profile, now);
    out.state = std::move(state);
    return out;
  }

  std::vector<Point2D> pts;
  pts.reserve(ids.size());
  for (auto id : ids) {
    if (id >= ctx.nodes.size()) throw ContractViolation("tally names an unknown node");
    pts.push_back(ctx.nodes[id]);
  }
  state.last_centroid = centroid(pts);

  if (profile.fine_grained) {
    const bool changed = !state.last_candidates || *state.last_candidates != ids;
    const bool fire = changed || state.unchanged_count + 1 >= profile.fine_cnt_limit;
    if (fire) {
      state.unchanged_count = 0;
      if (ctx.fine_available(actual)) {
        state.last_fix = Fix{tdoa_fix(actual, ctx.tdoa, rng), now};
        state.dead_reckon_offset = {};
        state.dead_reckon_steps = 0;
        state.coarse_fallback = false;
        ++state.fgl_count;
        out.fired_fgl = true;
      } else {
        state.last_fix.reset();
        state.coarse_fallback = true;
        ++state.fgl_unavailable;
      }
    } else {
      ++state.unchanged_count;
    }
    state.last_candidates = ids;
  }

  out.estimate = current_estimate(state, profile, now);
  out.state = std::move(state);
  return out;
}

inline NtlState dead_reckon_accumulate(NtlState state, const SensedStep& sensed, const NtlProfile& profile) {
  if (!profile.self_localize) throw ContractViolation("dead reckoning needs a self-localizing profile");
  if (sensed.detected) state.dead_reckon_offset += sensed.displacement();
  ++state.dead_reckon_steps;
  return state;
}

}  // namespace gradeloc
