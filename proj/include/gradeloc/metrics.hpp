#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradeloc/engine.hpp"
#include "gradeloc/error.hpp"
#include "gradeloc/planner.hpp"

namespace gradeloc {

// Error-index upper bounds in meters (index 1..7). Cumulative and closed: an
// error of exactly 10 m counts under index 3 and every index above it.
inline constexpr std::array<double, 7> kErrorBounds = {2.0, 5.0, 10.0, 20.0, 30.0, 50.0, 75.0};

struct MetricsReport {
  std::size_t n_samples = 0;
  std::size_t warmup_samples = 0;  // samples without an estimate, excluded below
  double cle = 0.0;                // sum of |E_i - A_i|
  double sum_sq = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::array<std::size_t, 7> within_count{};
  std::array<double, 7> within_bound{};
  std::size_t fgl_count = 0;
  std::size_t fgl_unavailable = 0;

  // Fraction with error <= bound of error index `idx` (1-based).
  double within(std::size_t idx) const { return within_bound.at(idx - 1); }

  void finalize() {
    const double n = static_cast<double>(n_samples);
    mae = n_samples ? cle / n : 0.0;
    rmse = n_samples ? std::sqrt(sum_sq / n) : 0.0;
    for (std::size_t i = 0; i < within_count.size(); ++i)
      within_bound[i] = n_samples ? static_cast<double>(within_count[i]) / n : 0.0;
  }

  void add_error(double e) {
    ++n_samples;
    cle += e;
    sum_sq += e * e;
    for (std::size_t i = 0; i < kErrorBounds.size(); ++i)
      if (e <= kErrorBounds[i]) ++within_count[i];
  }
};

inline MetricsReport metrics_from_errors(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("no samples to report on");
  MetricsReport r;
  for (double e : errors) r.add_error(e);
  r.finalize();
  return r;
}

inline MetricsReport compute_metrics(const Trace& trace, const std::string& label) {
  const auto k = trace.label_index(label);
  MetricsReport r;
  for (const auto& s : trace.samples) {
    if (s.ntl != k) continue;
    if (s.estimate.method == EstimateMethod::None) {
      ++r.warmup_samples;
      continue;
    }
    r.add_error(distance(s.estimate.pos, s.actual));
  }
  if (r.n_samples == 0) throw DomainError("trace has no estimated samples for '" + label + "'");
  r.fgl_count = trace.fgl_count.at(k);
  r.fgl_unavailable = trace.fgl_unavailable.at(k);
  r.finalize();
  return r;
}

// Sample-weighted combination of reports over disjoint sample sets.
inline MetricsReport merge(const MetricsReport& a, const MetricsReport& b) {
  MetricsReport r;
  r.n_samples = a.n_samples + b.n_samples;
  r.warmup_samples = a.warmup_samples + b.warmup_samples;
  r.cle = a.cle + b.cle;
  r.sum_sq = a.sum_sq + b.sum_sq;
  for (std::size_t i = 0; i < r.within_count.size(); ++i) r.within_count[i] = a.within_count[i] + b.within_count[i];
  r.fgl_count = a.fgl_count + b.fgl_count;
  r.fgl_unavailable = a.fgl_unavailable + b.fgl_unavailable;
  r.finalize();
  return r;
}

// Extra fine-localization requests of `a` relative to `b`; nullopt when b made none.
inline std::optional<double> fgl_overhead(const MetricsReport& a, const MetricsReport& b) {
  if (b.fgl_count == 0) return std::nullopt;
  return (static_cast<double>(a.fgl_count) - static_cast<double>(b.fgl_count)) / static_cast<double>(b.fgl_count);
}

struct TheoryComparison {
  double theory = 0.0;
  double relative_delta = 0.0;
};

inline TheoryComparison compare_theory(double sim_mae, double cell_side, double range) {
  const double th = theoretical_mae(cell_side, range);
  return {th, (sim_mae - th) / th};
}

}  // namespace gradeloc
