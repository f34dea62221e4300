#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/rng.hpp"

namespace gradeloc {

struct Rect {
  Point2D min{};
  Point2D max{};

  bool contains(Point2D p) const {
    return p.x >= min.x - kRangeTolerance && p.y >= min.y - kRangeTolerance &&
           p.x <= max.x + kRangeTolerance && p.y <= max.y + kRangeTolerance;
  }
};

// Pedestrian walk from the top-left to the bottom-right corner of the field,
// one step per second.
struct MobilityConfig {
  double stride_min = 0.7;
  double stride_max = 0.8;
  std::size_t segment_steps = 10;  // N: a new direction is drawn every N steps
  Rect field{{0.0, 0.0}, {300.0, 300.0}};

  void validate() const {
    if (!(stride_min > 0.0 && stride_min <= stride_max))
      throw ConfigError("strides must satisfy 0 < stride_min <= stride_max");
    if (segment_steps < 1) throw ConfigError("segment length N must be >= 1");
    if (!(field.max.x > field.min.x && field.max.y > field.min.y))
      throw ConfigError("field must have positive width and height");
  }
};

// SA, DA as ratios; GA in degrees.
struct SensorErrorModel {
  double stride_accuracy = 1.0;
  double detect_accuracy = 1.0;
  double heading_error_deg = 0.0;

  void validate() const {
    if (!(stride_accuracy > 0.0 && stride_accuracy <= 1.0)) throw ConfigError("SA must lie in (0, 1]");
    if (!(detect_accuracy > 0.0 && detect_accuracy <= 1.0)) throw ConfigError("DA must lie in (0, 1]");
    if (!(heading_error_deg >= 0.0) || !std::isfinite(heading_error_deg))
      throw ConfigError("GA must be >= 0 degrees");
  }
};

enum class Heading { Right, Down };

struct WalkState {
  Point2D actual_pos{};
  Heading current_dir = Heading::Right;
  std::size_t steps_in_segment = 0;
  bool episode_done = false;
};

struct StepEvent {
  double actual_stride = 0.0;
  Heading actual_dir = Heading::Right;

  Point2D displacement() const {
    return actual_dir == Heading::Right ? Point2D{actual_stride, 0.0} : Point2D{0.0, actual_stride};
  }
};

struct WalkStep {
  WalkState state;
  StepEvent event;
};

namespace detail {

// A direction is blocked once the remaining room is within one maximal stride.
inline bool blocked(const WalkState& s, const MobilityConfig& cfg, Heading h) {
  const double room = h == Heading::Right ? cfg.field.max.x - s.actual_pos.x : cfg.field.max.y - s.actual_pos.y;
  return room <= cfg.stride_max + kRangeTolerance;
}

inline Heading other(Heading h) { return h == Heading::Right ? Heading::Down : Heading::Right; }

}  // namespace detail

inline WalkState walk_start(const MobilityConfig& cfg) {
  WalkState s;
  s.actual_pos = cfg.field.min;
  s.episode_done = detail::blocked(s, cfg, Heading::Right) && detail::blocked(s, cfg, Heading::Down);
  return s;
}

// One step. Draw order per call: direction (only at segment starts), then stride.
inline WalkStep advance_walk(WalkState state, const MobilityConfig& cfg, Rng& rng) {
  if (state.episode_done) throw ContractViolation("advance_walk called after the episode finished");
  if (state.steps_in_segment == 0 || state.steps_in_segment >= cfg.segment_steps) {
    state.current_dir = rng.coin() ? Heading::Down : Heading::Right;
    state.steps_in_segment = 0;
  }
  if (detail::blocked(state, cfg, state.current_dir)) state.current_dir = detail::other(state.current_dir);

  StepEvent ev{rng.uniform(cfg.stride_min, cfg.stride_max), state.current_dir};
  state.actual_pos += ev.displacement();
  ++state.steps_in_segment;
  state.episode_done =
      detail::blocked(state, cfg, Heading::Right) && detail::blocked(state, cfg, Heading::Down);
  return {state, ev};
}

struct SensedStep {
  bool detected = false;
  double reported_stride = 0.0;
  Heading axis = Heading::Right;  // true movement axis the heading error is applied to
  double heading_error_rad = 0.0;

  // Reported heading: the movement axis tilted toward the other axis by GA.
  double reported_heading() const {
    return axis == Heading::Right ? heading_error_rad : std::numbers::pi / 2.0 - heading_error_rad;
  }

  // Sensed displacement; zero when the step was missed. Built per axis so an
  // error-free sensor reproduces the axis-aligned step exactly.
  Point2D displacement() const {
    if (!detected) return {};
    const double along = reported_stride * std::cos(heading_error_rad);
    const double across = reported_stride * std::sin(heading_error_rad);
    return axis == Heading::Right ? Point2D{along, across} : Point2D{across, along};
  }
};

// One uniform draw per call (step detection).
inline SensedStep sense_step(const StepEvent& ev, const SensorErrorModel& err, Rng& rng) {
  SensedStep s;
  s.detected = rng.uniform() < err.detect_accuracy;
  s.reported_stride = err.stride_accuracy * ev.actual_stride;
  s.axis = ev.actual_dir;
  s.heading_error_rad = err.heading_error_deg * std::numbers::pi / 180.0;
  return s;
}

}  // namespace gradeloc
