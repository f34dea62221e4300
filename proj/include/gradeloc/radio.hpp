#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/rng.hpp"

namespace gradeloc {

// Virtual time. Integer milliseconds so event ordering never drifts.
using Millis = std::int64_t;

inline Millis to_millis(double seconds) { return static_cast<Millis>(std::llround(seconds * 1000.0)); }
inline double to_seconds(Millis ms) { return static_cast<double>(ms) / 1000.0; }

struct IdealDisk {
  double range = 84.0;
};

// Disk with an independent per-beacon loss probability inside the range.
struct BernoulliDisk {
  double range = 84.0;
  double loss_prob = 0.0;
};

// Certain reception up to reliable_radius, then linearly falling to zero at range.
struct DistanceDecay {
  double reliable_radius = 60.0;
  double range = 84.0;
};

using ReceptionModel = std::variant<IdealDisk, BernoulliDisk, DistanceDecay>;

inline double model_range(const ReceptionModel& m) {
  return std::visit([](const auto& v) { return v.range; }, m);
}

inline void validate(const ReceptionModel& m) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if (!(v.range > 0.0) || !std::isfinite(v.range)) throw ConfigError("reception range must be > 0");
        if constexpr (std::is_same_v<T, BernoulliDisk>) {
          if (!(v.loss_prob >= 0.0 && v.loss_prob < 1.0))
            throw ConfigError("loss probability must lie in [0, 1)");
        } else if constexpr (std::is_same_v<T, DistanceDecay>) {
          if (!(v.reliable_radius > 0.0 && v.reliable_radius <= v.range))
            throw ConfigError("reliable radius must lie in (0, range]");
        }
      },
      m);
}

// Probability that one beacon sent from `distance` meters away is received.
inline double reception_probability(double distance, const ReceptionModel& m) {
  return std::visit(
      [distance](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if (distance > v.range + kRangeTolerance) return 0.0;
        if constexpr (std::is_same_v<T, IdealDisk>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, BernoulliDisk>) {
          return 1.0 - v.loss_prob;
        } else {
          if (distance <= v.reliable_radius) return 1.0;
          if (v.range <= v.reliable_radius) return 1.0;
          return std::clamp((v.range - distance) / (v.range - v.reliable_radius), 0.0, 1.0);
        }
      },
      m);
}

// Consumes exactly one uniform draw per call so a lane's stream stays aligned
// regardless of distance.
inline bool reception_decision(double distance, const ReceptionModel& m, Rng& rng) {
  const double u = rng.uniform();
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if (distance > v.range + kRangeTolerance) return false;
        if constexpr (std::is_same_v<T, IdealDisk>) {
          return true;
        } else if constexpr (std::is_same_v<T, BernoulliDisk>) {
          return u >= v.loss_prob;
        } else {
          return u < reception_probability(distance, m);
        }
      },
      m);
}

struct Beacon {
  std::size_t source_id = 0;
  Point2D source_pos{};
  Millis emit_time = 0;

  bool operator==(const Beacon&) const = default;
};

// Per-node offsets in [0, p), whole milliseconds.
inline std::vector<Millis> draw_phases(std::size_t nodes, Millis beacon_interval, Rng& rng) {
  std::vector<Millis> out(nodes);
  for (auto& ph : out)
    ph = std::min<Millis>(beacon_interval - 1,
                          static_cast<Millis>(rng.uniform() * static_cast<double>(beacon_interval)));
  return out;
}

// Every beacon emitted in [begin, end): node i fires at phases[i] + k * p.
// Ordered by time, ties broken by node id.
inline std::vector<Beacon> beacon_schedule(std::span<const Point2D> nodes, Millis beacon_interval,
                                           std::span<const Millis> phases, Millis begin, Millis end) {
  if (beacon_interval <= 0) throw ConfigError("beacon interval must be > 0");
  if (phases.size() != nodes.size()) throw ConfigError("one phase per node required");
  std::vector<Beacon> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Millis ph = phases[i];
    if (ph < 0 || ph >= beacon_interval) throw ConfigError("beacon phase must lie in [0, p)");
    // first k with ph + k*p >= begin
    Millis k = begin <= ph ? 0 : (begin - ph + beacon_interval - 1) / beacon_interval;
    for (Millis t = ph + k * beacon_interval; t < end; t += beacon_interval) out.push_back({i, nodes[i], t});
  }
  std::sort(out.begin(), out.end(), [](const Beacon& a, const Beacon& b) {
    return a.emit_time != b.emit_time ? a.emit_time < b.emit_time : a.source_id < b.source_id;
  });
  return out;
}

struct Reception {
  Millis time = 0;
  std::size_t node = 0;
};

struct BeaconTally {
  Millis window_start = 0;
  Millis window_len = 0;
  std::map<std::size_t, std::size_t> counts;

  std::size_t count(std::size_t node) const {
    auto it = counts.find(node);
    return it == counts.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& [_, c] : counts) s += c;
    return s;
  }
};

// Counts receptions per node in the half-open window [start, start + len).
inline BeaconTally window_tally(std::span<const Reception> receptions, Millis window_start, Millis window_len) {
  if (window_len <= 0) throw ConfigError("tally window must be > 0");
  BeaconTally tally{window_start, window_len, {}};
  for (std::size_t i = 0; i < receptions.size(); ++i) {
    if (i > 0 && receptions[i].time < receptions[i - 1].time)
      throw ContractViolation("receptions must be sorted by time");
    const Millis t = receptions[i].time;
    if (t >= window_start && t < window_start + window_len) ++tally.counts[receptions[i].node];
  }
  return tally;
}

}  // namespace gradeloc
