// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gradeloc/gradeloc.hpp"

using namespace gradeloc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string csv_of(const Trace& t) {
  std::ostringstream out;
  write_trace_csv(out, t);
  return out.str();
}

const double kHalfSqrt5L75 = 75.0 * std::sqrt(5.0) / 2.0;

Outcome closed_form() {
  Outcome o;
  const double r = min_ntl_range(75);
  o.check(std::abs(r - 83.8525) <= 1e-3, "min_ntl_range(75) = " + fmt("%.6f", r));
  o.check(min_ntl_range_rounded(75) == 84.0, "rounded range != 84");
  const auto t = derive_timing(75, 1, 0.1, 0.9);
  o.check(std::abs(t.centroid_interval_raw - 8.85) <= 0.01, "P_raw = " + fmt("%.4f", t.centroid_interval_raw));
  o.check(t.centroid_interval == 10.0 && t.beacon_interval == 1.0 && t.max_beacons == 10, "P/p/maxBeacons");
  const auto bound = fine_cnt_limit_bound(37.5, 10, 1);
  o.check(bound == 7 && 4 <= bound, "fineCntLimit bound = " + std::to_string(bound));
  const double ratio = theoretical_mae(75, kHalfSqrt5L75) / 75;
  o.check(std::abs(ratio - 0.3199) <= 1e-3, "MAE/L = " + fmt("%.5f", ratio));
  const double frac = region_area_fraction(75, kHalfSqrt5L75);
  o.check(std::abs(frac - 0.829) <= 1e-3, "area fraction = " + fmt("%.5f", frac));
  o.note("R=" + fmt("%.4f", r) + " P_raw=" + fmt("%.3f", t.centroid_interval_raw) + " bound=" + std::to_string(bound) +
         " MAE/L=" + fmt("%.5f", ratio) + " area=" + fmt("%.4f", frac));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const double th = theoretical_mae(75, 83.8525);
  const double mc = monte_carlo_analytical_mae(75, 83.8525, 1000000, 42);
  const double rel = std::abs(mc - th) / th;
  o.check(rel <= 0.01, "relative delta " + fmt("%.5f", rel));
  o.note("theory=" + fmt("%.4f", th) + " MC=" + fmt("%.4f", mc) + " |delta|=" + fmt("%.5f", rel));
  return o;
}

Outcome coverage_theorem() {
  Outcome o;
  const auto at = verify_three_anchor_coverage(75, kHalfSqrt5L75, 100000, 42);
  const auto below = verify_three_anchor_coverage(75, 0.99 * kHalfSqrt5L75, 100000, 42);
  o.check(at.ok, "coverage fails at L*sqrt5/2");
  o.check(!below.ok, "coverage holds at 0.99 L*sqrt5/2");
  o.note("at bound: " + std::to_string(at.failures) + " failures; 0.99x: " + std::to_string(below.failures) +
         " failures, first at (" + fmt("%.2f", below.worst_point.x) + "," + fmt("%.2f", below.worst_point.y) + ")");
  return o;
}

Outcome connectivity() {
  Outcome o;
  const auto nodes = grid_positions({5, 5, 75, {}});
  const auto g84 = connectivity_graph(nodes, 84);
  const auto g74 = connectivity_graph(nodes, 74);
  o.check(g84.connected, "R=84 not connected");
  o.check(g74.edge_count() == 0, "R=74 has edges");
  o.note("R=84: " + std::to_string(g84.edge_count()) + " edges, connected; R=74: " + std::to_string(g74.edge_count()) +
         " edges");
  return o;
}

Outcome tdoa_bounds() {
  Outcome o;
  Rng rng(42, "tdoa/acceptance");
  double lo = 1e9, hi = 0;
  std::size_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const Point2D a{150, 150};
    const double e = distance(tdoa_fix(a, {1, 5}, rng), a);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    if (e < 1.414 || e > 7.0711) ++bad;
  }
  o.check(bad == 0, std::to_string(bad) + " fixes out of [1.414, 7.071]");
  o.note("min=" + fmt("%.4f", lo) + " max=" + fmt("%.4f", hi));
  return o;
}

const char* kLabels[] = {"EFG-NTL-Accurate", "EFG-NTL-Inaccurate", "FG-NTL-Improved", "FG-NTL", "CG-NTL"};

Outcome paired_sweep(const std::vector<Trace>& traces) {
  Outcome o;
  std::vector<MetricsReport> agg(5);
  std::size_t ordering_breaks = 0;
  for (const auto& t : traces) {
    std::vector<double> mae;
    for (int k = 0; k < 5; ++k) {
      const auto m = compute_metrics(t, kLabels[k]);
      mae.push_back(m.mae);
      agg[k] = agg[k].n_samples ? merge(agg[k], m) : m;
    }
    for (int k = 0; k + 1 < 5; ++k)
      if (mae[k] > mae[k + 1]) ++ordering_breaks;
  }
  const double efga = agg[0].within(3), efgi = agg[1].within(3), fgi = agg[2].within(3), fg = agg[3].within(3),
               cg = agg[4].within(3);
  const auto overhead = fgl_overhead(agg[2], agg[3]);

  o.check(ordering_breaks == 0, "(a) MAE ordering broken " + std::to_string(ordering_breaks) + " times");
  o.check(efga >= 0.99, "(b) EFG-Accurate within-10m " + fmt("%.3f", efga));
  o.check(cg <= 0.05, "(c) CG within-10m " + fmt("%.3f", cg) + " > 0.05");
  o.check(fgi > fg && std::abs(fgi - 0.59) <= 0.10 && std::abs(fg - 0.47) <= 0.10,
          "(d) FG-Improved/FG within-10m " + fmt("%.3f", fgi) + "/" + fmt("%.3f", fg));
  o.check(std::abs(efgi - 0.89) <= 0.07, "(e) EFG-Inaccurate within-10m " + fmt("%.3f", efgi));
  o.check(overhead && *overhead >= 0.03 && *overhead <= 0.15,
          "(f) overhead " + (overhead ? fmt("%.4f", *overhead) : std::string("undefined")));

  std::string s = "within-10m EFG-A " + fmt("%.3f", efga) + ", EFG-I " + fmt("%.3f", efgi) + ", FG-I " + fmt("%.3f", fgi) +
                  ", FG " + fmt("%.3f", fg) + ", CG " + fmt("%.3f", cg) + "; MAE";
  for (int k = 0; k < 5; ++k) s += " " + fmt("%.2f", agg[k].mae);
  s += "; overhead " + (overhead ? fmt("%.4f", *overhead) : std::string("n/a"));
  o.note(s);
  return o;
}

Outcome theory_vs_sim() {
  Outcome o;
  for (double L : {50.0, 75.0, 100.0}) {
    const double R = min_ntl_range(L);
    auto s = scaled_cg_scenario(paper_defaults(), L, R);
    s.target_samples = 10000;
    MetricsReport agg;
    for (const auto& t : run_replicates(s, 10)) {
      const auto r = compute_metrics(t, "CG-NTL");
      agg = agg.n_samples ? merge(agg, r) : r;
    }
    const auto cmp = compare_theory(agg.mae, L, R);
    o.check(std::abs(cmp.relative_delta) <= 0.15, "L=" + fmt("%.0f", L) + " delta " + fmt("%+.4f", cmp.relative_delta));
    o.note("L=" + fmt("%.0f", L) + ": sim " + fmt("%.3f", agg.mae) + " vs theory " + fmt("%.3f", cmp.theory) + " (" +
           fmt("%+.4f", cmp.relative_delta) + ")");
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto s = paper_defaults();
  const auto a = csv_of(run_scenario(s));
  const auto b = csv_of(run_scenario(s));
  o.check(a == b, "same seed gave different trace CSV");
  auto small = s;
  small.target_samples = 2000;
  const auto batch = run_replicates(small, 5);
  auto alone = small;
  alone.seed = replicate_seed(small.seed, 3);
  o.check(csv_of(run_scenario(alone)) == csv_of(batch[3]), "replicate 3 standalone != batch");
  o.note("trace CSV " + std::to_string(a.size()) + " bytes identical; replicate 3 standalone == batch");
  return o;
}

Outcome properties(const std::vector<Trace>& traces) {
  Outcome o;
  std::size_t checks = 0;
  for (const auto& t : traces) {
    for (const auto& label : t.labels) {
      const auto m = compute_metrics(t, label);
      o.check(m.rmse >= m.mae, label + " rmse < mae");
      for (std::size_t i = 2; i <= 7; ++i) o.check(m.within(i) >= m.within(i - 1), label + " within_bound not monotone");
      // CLE additivity over a split of the trace
      Trace a = t, b = t;
      const std::size_t half = t.samples.size() / 2;
      a.samples.assign(t.samples.begin(), t.samples.begin() + static_cast<std::ptrdiff_t>(half));
      b.samples.assign(t.samples.begin() + static_cast<std::ptrdiff_t>(half), t.samples.end());
      const auto joined = merge(compute_metrics(a, label), compute_metrics(b, label));
      o.check(std::abs(joined.cle - m.cle) <= 1e-6 * std::max(1.0, m.cle) && joined.n_samples == m.n_samples,
              label + " CLE not additive");
      checks += 3;
    }
    o.check(t.fgl_count[t.label_index("CG-NTL")] == 0, "CG fgl_count != 0");
    o.check(t.fgl_count[t.label_index("FG-NTL-Improved")] >= t.fgl_count[t.label_index("FG-NTL")],
            "fgl_count(FG-Improved) < fgl_count(FG)");
    checks += 2;
  }

  auto s = paper_defaults();
  s.target_samples = 5000;
  s.profiles = {{"EFG-Perfect", NtlProfile::extra_fine(100), {1.0, 1.0, 0.0}}};
  s.tdoa = {0.0, 0.0};
  const auto t = run_scenario(s);
  double worst = 0;
  for (const auto& x : t.samples)
    if (x.estimate.method == EstimateMethod::Fine || x.estimate.method == EstimateMethod::DeadReckoned)
      worst = std::max(worst, distance(x.estimate.pos, x.actual));
  o.check(worst <= 1e-9, "error-free dead reckoning drifted " + fmt("%.3g", worst));
  o.note(std::to_string(checks + 1) + " property checks; max error-free DR deviation " + fmt("%.2g", worst) + " m");
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "closed-form checks", closed_form);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "three-anchor coverage", coverage_theorem);
  report(4, "connectivity", connectivity);
  report(5, "TDOA fix bounds", tdoa_bounds);

  std::vector<Trace> sweep;
  std::string sweep_error;
  try {
    sweep = run_replicates(paper_defaults(), 10);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto need_sweep = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!sweep_error.empty()) throw std::runtime_error("sweep failed: " + sweep_error);
      return fn(sweep);
    };
  };
  report(6, "paired sweep, 10 replicates", need_sweep(paired_sweep));
  report(7, "theory vs simulation", theory_vs_sim);
  report(8, "determinism", determinism);
  report(9, "property suite", need_sweep(properties));

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
