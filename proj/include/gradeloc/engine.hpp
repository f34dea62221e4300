#pragma once

// Deterministic discrete-event loop. Every simulated second, in this order:
//   1. beacons emitted during the past second are received (or not) at the
//      NTL's position held over that second;
//   2. the walker takes one step; self-localizing NTLs sense it;
//   3. one (actual, estimate) sample is recorded per NTL;
//   4. every P seconds since the episode began, each NTL runs its update on
//      the window that just closed.
// All NTLs share one trajectory and one reception stream, so comparisons
// between profiles are paired. When the walk reaches the bottom-right corner
// a new episode starts at the top-left corner with fresh NTL state.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/localization.hpp"
#include "gradeloc/mobility.hpp"
#include "gradeloc/planner.hpp"
#include "gradeloc/radio.hpp"
#include "gradeloc/rng.hpp"

namespace gradeloc {

struct ProfileSpec {
  std::string label;
  NtlProfile profile;
  SensorErrorModel sensors{};  // used only when profile.self_localize
};

struct Scenario {
  GridConfig grid{};
  ReceptionModel reception = BernoulliDisk{84.0, 0.03};
  double centroid_interval = 10.0;  // P, seconds
  double beacon_interval = 1.0;     // p, seconds
  double threshold = 0.9;           // T
  std::vector<ProfileSpec> profiles;
  MobilityConfig mobility{};  // field is always the grid's extent
  TdoaErrorModel tdoa{};
  std::optional<double> duration;              // seconds
  std::optional<std::size_t> target_samples;   // valid samples per NTL
  std::uint64_t seed = 42;

  Millis centroid_interval_ms() const { return to_millis(centroid_interval); }
  Millis beacon_interval_ms() const { return to_millis(beacon_interval); }
  std::size_t max_beacons() const {
    return static_cast<std::size_t>(centroid_interval_ms() / std::max<Millis>(1, beacon_interval_ms()));
  }

  // Field spanned by the grid; the walk never leaves it.
  MobilityConfig effective_mobility() const {
    MobilityConfig m = mobility;
    m.field = {grid.origin, grid.max_corner()};
    return m;
  }

  // Profile with the scenario-wide timing and threshold filled in.
  NtlProfile effective_profile(std::size_t k) const {
    NtlProfile p = profiles.at(k).profile;
    p.threshold = threshold;
    p.max_beacons = max_beacons();
    p.centroid_interval = centroid_interval_ms();
    return p;
  }

  void validate() const {
    grid.validate();
    gradeloc::validate(reception);
    const Millis P = centroid_interval_ms();
    const Millis p = beacon_interval_ms();
    if (p <= 0 || P <= 0) throw ConfigError("timing: P and p must be > 0");
    if (P % 1000 != 0) throw ConfigError("timing: P must be a whole number of seconds (one step per second)");
    if (P % p != 0) throw ConfigError("timing: P must be an integer multiple of p (maxBeacons * p = P)");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("timing: threshold T must lie in (0, 1]");
    if (profiles.empty()) throw ConfigError("scenario needs at least one NTL profile");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      const auto& ps = profiles[k];
      if (ps.label.empty()) throw ConfigError("profile label must not be empty");
      if (!seen.insert(ps.label).second) throw ConfigError("duplicate profile label '" + ps.label + "'");
      effective_profile(k).validate();
      if (ps.profile.self_localize) ps.sensors.validate();
    }
    effective_mobility().validate();
    tdoa.validate();
    if (duration.has_value() == target_samples.has_value())
      throw ConfigError("exactly one of duration and target_samples must be set");
    if (duration && !(*duration > centroid_interval))
      throw ConfigError("duration must exceed the centroid interval P");
    if (target_samples && *target_samples < 1) throw ConfigError("target_samples must be >= 1");
  }

  std::size_t profile_index(const std::string& label) const {
    for (std::size_t k = 0; k < profiles.size(); ++k)
      if (profiles[k].label == label) return k;
    throw ConfigError("no profile labelled '" + label + "'");
  }
};

struct TraceSample {
  Millis time = 0;
  std::size_t ntl = 0;  // index into Trace::labels
  Point2D actual{};
  LocationEstimate estimate{};
};

struct FglEvent {
  Millis time = 0;
  std::size_t ntl = 0;
};

struct Trace {
  std::vector<std::string> labels;
  std::vector<TraceSample> samples;
  std::vector<FglEvent> fgl_events;
  std::vector<std::size_t> fgl_count;        // per NTL, summed over episodes
  std::vector<std::size_t> fgl_unavailable;  // per NTL
  std::size_t episodes = 0;

  std::size_t label_index(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ConfigError("trace has no NTL labelled '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }
};

inline Trace run_scenario(const Scenario& s) {
  s.validate();
  const auto nodes = grid_positions(s.grid);
  const auto mobility = s.effective_mobility();
  const Millis P = s.centroid_interval_ms();
  const Millis p = s.beacon_interval_ms();
  const std::size_t n_ntl = s.profiles.size();

  std::vector<NtlProfile> profiles;
  for (std::size_t k = 0; k < n_ntl; ++k) profiles.push_back(s.effective_profile(k));

  const LocalizationContext ctx{nodes, model_range(s.reception), s.grid.cell_side, s.tdoa};

  Rng phase_rng(s.seed, "phase");
  const auto phases = draw_phases(nodes.size(), p, phase_rng);
  Rng walk_rng(s.seed, "walk");
  std::vector<Rng> radio_rng, tdoa_rng, sense_rng;
  for (std::size_t i = 0; i < nodes.size(); ++i) radio_rng.emplace_back(s.seed, "radio/" + std::to_string(i));
  for (const auto& ps : s.profiles) {
    tdoa_rng.emplace_back(s.seed, "tdoa/" + ps.label);
    sense_rng.emplace_back(s.seed, "sense/" + ps.label);
  }

  Trace trace;
  for (const auto& ps : s.profiles) trace.labels.push_back(ps.label);
  trace.fgl_count.assign(n_ntl, 0);
  trace.fgl_unavailable.assign(n_ntl, 0);

  const Millis duration_ms = s.duration ? to_millis(*s.duration) : 0;
  // Guard against profiles that never produce an estimate.
  const Millis cap_ms = s.target_samples ? static_cast<Millis>(*s.target_samples) * 1000 * 10 + 10 * P : 0;
  if (s.target_samples) trace.samples.reserve(*s.target_samples * n_ntl * 11 / 10);

  WalkState walk = walk_start(mobility);
  if (walk.episode_done) throw ConfigError("field is too small for a single step");
  std::vector<NtlState> states(n_ntl);
  std::vector<std::size_t> valid(n_ntl, 0);
  std::vector<Reception> receptions;
  Millis episode_start = 0;
  trace.episodes = 1;

  auto finished = [&](Millis now) {
    if (s.duration) return now >= duration_ms;
    return std::all_of(valid.begin(), valid.end(), [&](std::size_t v) { return v >= *s.target_samples; });
  };

  for (Millis now = 1000;; now += 1000) {
    for (const auto& b : beacon_schedule(nodes, p, phases, now - 1000, now)) {
      const double d = distance(b.source_pos, walk.actual_pos);
      if (reception_decision(d, s.reception, radio_rng[b.source_id])) receptions.push_back({b.emit_time, b.source_id});
    }

    const auto step = advance_walk(walk, mobility, walk_rng);
    walk = step.state;
    for (std::size_t k = 0; k < n_ntl; ++k)
      if (profiles[k].self_localize)
        states[k] = dead_reckon_accumulate(std::move(states[k]), sense_step(step.event, s.profiles[k].sensors, sense_rng[k]),
                                           profiles[k]);

    for (std::size_t k = 0; k < n_ntl; ++k) {
      const auto est = current_estimate(states[k], profiles[k], now);
      trace.samples.push_back({now, k, walk.actual_pos, est});
      if (est.method != EstimateMethod::None) ++valid[k];
    }

    if ((now - episode_start) % P == 0) {
      const auto tally = window_tally(receptions, now - P, P);
      receptions.clear();
      for (std::size_t k = 0; k < n_ntl; ++k) {
        auto res = ntl_update(std::move(states[k]), tally, walk.actual_pos, profiles[k], ctx, tdoa_rng[k], now);
        states[k] = std::move(res.state);
        if (res.fired_fgl) trace.fgl_events.push_back({now, k});
      }
    }

    if (walk.episode_done) {
      for (std::size_t k = 0; k < n_ntl; ++k) {
        trace.fgl_count[k] += states[k].fgl_count;
        trace.fgl_unavailable[k] += states[k].fgl_unavailable;
        states[k] = NtlState{};
      }
      walk = walk_start(mobility);
      episode_start = now;
      receptions.clear();
      ++trace.episodes;
    }

    if (finished(now)) break;
    if (s.target_samples && now >= cap_ms)
      throw std::runtime_error("simulation stopped: some NTL produced no estimates for too long");
  }
  for (std::size_t k = 0; k < n_ntl; ++k) {
    trace.fgl_count[k] += states[k].fgl_count;
    trace.fgl_unavailable[k] += states[k].fgl_unavailable;
  }
  return trace;
}

// Replicate k runs the scenario under replicate_seed(seed, k); the result does
// not depend on `jobs` or on scheduling.
inline std::vector<Trace> run_replicates(const Scenario& s, std::size_t n_replicates, std::size_t jobs = 1) {
  if (n_replicates < 1) throw ConfigError("need at least one replicate");
  s.validate();
  std::vector<Trace> out(n_replicates);
  auto run_one = [&](std::size_t k) {
    Scenario rep = s;
    rep.seed = replicate_seed(s.seed, k);
    out[k] = run_scenario(rep);
  };
  jobs = std::clamp<std::size_t>(jobs, 1, n_replicates);
  if (jobs == 1) {
    for (std::size_t k = 0; k < n_replicates; ++k) run_one(k);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n_replicates; k += jobs) run_one(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// The five NTL types the sweep compares.
inline std::vector<ProfileSpec> paper_profiles() {
  return {
      {"CG-NTL", NtlProfile::coarse(), {}},
      {"FG-NTL-Improved", NtlProfile::fine(4), {}},
      {"FG-NTL", NtlProfile::fine(100), {}},
      {"EFG-NTL-Accurate", NtlProfile::extra_fine(100), {0.95, 0.99, 5.0}},
      {"EFG-NTL-Inaccurate", NtlProfile::extra_fine(100), {0.90, 0.90, 10.0}},
  };
}

// 5x5 grid, L = 75 m, R = 84 m, P = 10 s, p = 1 s, T = 0.9, strides in
// [0.7, 0.8] m, TDOA error U[1, 5] m per axis. The Bernoulli loss and the
// segment length are calibration choices, not measured values.
inline Scenario paper_defaults() {
  Scenario s;
  s.grid = {5, 5, 75.0, {0.0, 0.0}};
  s.reception = BernoulliDisk{84.0, 0.03};
  s.centroid_interval = 10.0;
  s.beacon_interval = 1.0;
  s.threshold = 0.9;
  s.profiles = paper_profiles();
  s.mobility = {0.7, 0.8, 60, {}};
  s.tdoa = {1.0, 5.0};
  s.target_samples = 10000;
  s.seed = 42;
  return s;
}

// A CG-only copy of `base` on cells of side L with NTL range R. Timing is
// re-derived for the new cell at the same granularity.
inline Scenario scaled_cg_scenario(Scenario base, double cell_side, double range) {
  base.grid.cell_side = cell_side;
  std::visit([range](auto& m) { m.range = range; }, base.reception);
  if (auto* dd = std::get_if<DistanceDecay>(&base.reception)) dd->reliable_radius = std::min(dd->reliable_radius, range);
  const double G = base.beacon_interval / base.centroid_interval;
  const auto timing = derive_timing(cell_side, 1.0, G, base.threshold);
  base.centroid_interval = timing.centroid_interval;
  base.beacon_interval = timing.beacon_interval;
  base.profiles = {{"CG-NTL", NtlProfile::coarse(), {}}};
  return base;
}

}  // namespace gradeloc
