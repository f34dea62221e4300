// gradeloc: deployment planning, simulation, theory checks and multi-NTL
// sweeps for graded-precision localization on a fixed beaconing grid.
//
// Exit codes: 0 success, 2 usage error, 3 validation error, 4 runtime error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradeloc/gradeloc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gradeloc;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

constexpr const char* kOutDirEnv = "GRADELOC_OUT_DIR";

const std::vector<std::string> kSweepLabels = {"CG-NTL", "FG-NTL-Improved", "FG-NTL", "EFG-NTL-Accurate",
                                               "EFG-NTL-Inaccurate"};

fs::path output_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- plan -----------------------------------------------------------------

struct PlanArgs {
  double L = 75.0;
  double S = 1.0;
  double G = 0.1;
  double T = 0.9;
  std::optional<double> R;
  std::size_t rows = 5;
  std::size_t cols = 5;
  bool as_json = false;
};

int cmd_plan(const PlanArgs& a) {
  const double raw = min_ntl_range(a.L);
  const double rounded = min_ntl_range_rounded(a.L);
  const double R = a.R.value_or(rounded);
  const auto timing = derive_timing(a.L, a.S, a.G, a.T);
  const double r1 = a.L / 2.0;
  const auto bound = fine_cnt_limit_bound(r1, timing.centroid_interval, a.S);
  const double mae = theoretical_mae(a.L, raw);
  const double frac = region_area_fraction(a.L, raw);
  const GridConfig grid{a.rows, a.cols, a.L, {}};
  const auto nodes = grid_positions(grid);
  const auto graph = connectivity_graph(nodes, R);
  const bool coverage = R + kRangeTolerance >= raw;

  json j = {{"schema_version", kSchemaVersion},
            {"cell_side_m", a.L},
            {"min_range_m", raw},
            {"min_range_rounded_m", rounded},
            {"range_m", R},
            {"timing",
             {{"centroid_interval_raw_s", timing.centroid_interval_raw},
              {"centroid_interval_s", timing.centroid_interval},
              {"beacon_interval_s", timing.beacon_interval},
              {"granularity", timing.granularity},
              {"max_beacons", timing.max_beacons},
              {"threshold", timing.threshold},
              {"threshold_count", timing.threshold_count()}}},
            {"fine_cnt_limit_bound", bound},
            {"theoretical_mae_m", mae},
            {"theoretical_mae_over_L", mae / a.L},
            {"region_area_fraction", frac},
            {"connected", graph.connected},
            {"three_anchor_range_ok", coverage}};
  if (!within_model_band(a.L, R)) j["warning"] = "range outside [L, L*sqrt(5)/2]; error model is approximate";

  if (a.as_json) {
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "cell side L            " << fmt("%.2f m", a.L) << '\n'
            << "min NTL range          " << fmt("%.2f m", raw) << " -> " << fmt("%.0f m", rounded) << '\n'
            << "centroid interval P    " << fmt("%.2f s raw", timing.centroid_interval_raw) << " -> "
            << fmt("%.0f s", timing.centroid_interval) << '\n'
            << "beacon interval p      " << fmt("%.0f s", timing.beacon_interval) << '\n'
            << "maxBeacons             " << timing.max_beacons << " (candidate at >= " << timing.threshold_count()
            << " beacons)\n"
            << "fineCntLimit bound     " << bound << '\n'
            << "theoretical MAE        " << fmt("%.2f m", mae) << fmt(" (%.4f L)", mae / a.L) << '\n'
            << "region area fraction   " << fmt("%.4f", frac) << '\n'
            << "grid " << a.rows << "x" << a.cols << " at R=" << fmt("%.2f m", R) << "  "
            << (graph.connected ? "connected" : "NOT connected") << '\n';
  if (j.contains("warning")) std::cout << "warning: " << j["warning"].get<std::string>() << '\n';
  return 0;
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_flag) {
  auto s = load_scenario(scenario_path);
  if (seed) s.seed = *seed;
  const auto trace = run_scenario(s);
  const auto dir = output_dir(out_flag);

  {
    std::ofstream csv(dir / "trace.csv");
    if (!csv) throw std::runtime_error("cannot write trace.csv");
    write_trace_csv(csv, trace);
  }
  json reports = json::object();
  for (const auto& label : trace.labels) {
    const auto r = compute_metrics(trace, label);
    reports[label] = report_json(r);
    std::cout << label << fmt("  MAE %.2f m", r.mae) << fmt("  RMSE %.2f m", r.rmse)
              << fmt("  <=10m %.3f", r.within(3)) << "  FGL " << r.fgl_count << '\n';
  }
  write_json(dir / "report.json",
             {{"schema_version", kSchemaVersion}, {"seed", s.seed}, {"episodes", trace.episodes}, {"ntl", reports}});
  std::cout << "wrote " << (dir / "trace.csv").string() << " and " << (dir / "report.json").string() << '\n';
  return 0;
}

// --- verify-theory --------------------------------------------------------

struct VerifyArgs {
  std::vector<double> L = {75.0};
  std::optional<double> R;
  std::size_t samples = 1000000;
  std::uint64_t seed = 42;
  std::size_t sim_samples = 10000;
  std::size_t replicates = 1;
  std::string scenario;
  std::string out;
};

// CG-only copy of `base` rescaled to cell side L and range R, timing re-derived.
int cmd_verify_theory(const VerifyArgs& a) {
  if (a.samples < 100000) throw ConfigError("--samples must be >= 100000");
  const Scenario base = a.scenario.empty() ? paper_defaults() : load_scenario(a.scenario);

  json rows = json::array();
  std::cout << "      L        R   theory       MC   MC/th-1      sim  sim/th-1   theory/L\n";
  for (double L : a.L) {
    const double R = a.R.value_or(min_ntl_range(L));
    const double th = theoretical_mae(L, R);
    const double mc = monte_carlo_analytical_mae(L, R, a.samples, a.seed);
    json row = {{"cell_side_m", L},
                {"range_m", R},
                {"theoretical_mae_m", th},
                {"monte_carlo_mae_m", mc},
                {"mc_relative_delta", (mc - th) / th},
                {"theoretical_mae_over_L", th / L}};
    std::string sim_col = "       -         -";
    if (a.sim_samples > 0) {
      auto s = scaled_cg_scenario(base, L, R);
      s.target_samples = a.sim_samples;
      s.duration.reset();
      s.seed = a.seed;
      MetricsReport agg;
      for (const auto& t : run_replicates(s, a.replicates)) {
        const auto r = compute_metrics(t, "CG-NTL");
        agg = agg.n_samples ? merge(agg, r) : r;
      }
      const auto cmp = compare_theory(agg.mae, L, R);
      row["simulated_cg_mae_m"] = agg.mae;
      row["sim_relative_delta"] = cmp.relative_delta;
      sim_col = fmt("%8.3f", agg.mae) + fmt("  %+8.4f", cmp.relative_delta);
    }
    std::cout << fmt("%7.2f", L) << fmt("  %7.3f", R) << fmt("  %7.3f", th) << fmt("  %7.3f", mc)
              << fmt("  %+8.4f", (mc - th) / th) << " " << sim_col << fmt("   %8.4f", th / L) << '\n';
    rows.push_back(row);
  }
  if (!a.out.empty() || std::getenv(kOutDirEnv)) {
    const auto dir = output_dir(a.out);
    write_json(dir / "verify_theory.json", {{"schema_version", kSchemaVersion}, {"rows", rows}});
  }
  return 0;
}

// --- sweep ----------------------------------------------------------------

int cmd_sweep(const std::string& scenario_path, std::size_t replicates, std::optional<std::uint64_t> seed,
              std::size_t jobs, const std::string& out_flag) {
  auto s = load_scenario(scenario_path);
  if (seed) s.seed = *seed;
  for (const auto& label : kSweepLabels) {
    bool found = false;
    for (const auto& p : s.profiles) found = found || p.label == label;
    if (!found) throw ScenarioError("profiles: sweep needs an NTL labelled '" + label + "'");
  }
  const auto traces = run_replicates(s, replicates, jobs);

  std::vector<MetricsReport> agg(kSweepLabels.size());
  json per_rep = json::array();
  std::string csv = "schema_version,replicate,ntl_label,n_samples,mae_m,rmse_m,within_10m,fgl_count\n";
  auto csv_row = [&](const std::string& rep, const std::string& label, const MetricsReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%zu,%.6f,%.6f,%.6f,%zu\n", kSchemaVersion, rep.c_str(), label.c_str(),
                  r.n_samples, r.mae, r.rmse, r.within(3), r.fgl_count);
    csv += buf;
  };
  for (std::size_t k = 0; k < traces.size(); ++k) {
    json rep = json::object();
    for (std::size_t i = 0; i < kSweepLabels.size(); ++i) {
      const auto r = compute_metrics(traces[k], kSweepLabels[i]);
      agg[i] = agg[i].n_samples ? merge(agg[i], r) : r;
      rep[kSweepLabels[i]] = report_json(r);
      csv_row(std::to_string(k), kSweepLabels[i], r);
    }
    per_rep.push_back(rep);
  }

  json summary = json::object();
  std::cout << "type  ntl                    MAE     RMSE   <=10m    FGL\n";
  for (std::size_t i = 0; i < kSweepLabels.size(); ++i) {
    csv_row("all", kSweepLabels[i], agg[i]);
    summary[kSweepLabels[i]] = report_json(agg[i]);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4zu  %-20s %7.3f  %7.3f  %6.3f  %5zu\n", i + 1, kSweepLabels[i].c_str(),
                  agg[i].mae, agg[i].rmse, agg[i].within(3), agg[i].fgl_count);
    std::cout << buf;
  }
  const auto overhead = fgl_overhead(agg[1], agg[2]);
  std::cout << "FG-NTL-Improved overhead vs FG-NTL: "
            << (overhead ? fmt("%+.4f", *overhead) : std::string("undefined (no FG-NTL requests)")) << '\n';

  const auto dir = output_dir(out_flag);
  {
    std::ofstream out(dir / "sweep.csv");
    if (!out) throw std::runtime_error("cannot write sweep.csv");
    out << csv;
  }
  write_json(dir / "sweep.json", {{"schema_version", kSchemaVersion},
                                  {"seed", s.seed},
                                  {"replicates", replicates},
                                  {"summary", summary},
                                  {"fgl_overhead_improved_vs_fg", overhead ? json(*overhead) : json(nullptr)},
                                  {"per_replicate", per_rep}});
  std::cout << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graded-precision localization planner and simulator"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "derive deployment parameters for a grid");
  plan_cmd->add_option("--L", plan.L, "grid cell side (m)")->required();
  plan_cmd->add_option("--S", plan.S, "maximum NTL speed (m/s)")->required();
  plan_cmd->add_option("--G", plan.G, "target granularity p/P")->capture_default_str();
  plan_cmd->add_option("--T", plan.T, "candidate threshold")->capture_default_str();
  plan_cmd->add_option("--R", plan.R, "node range to evaluate (default: rounded minimum)");
  plan_cmd->add_option("--rows", plan.rows, "grid rows")->capture_default_str();
  plan_cmd->add_option("--cols", plan.cols, "grid columns")->capture_default_str();
  plan_cmd->add_flag("--json", plan.as_json, "emit JSON");

  std::string scenario, out;
  std::optional<std::uint64_t> seed;
  auto* sim_cmd = app.add_subcommand("simulate", "run one scenario, write trace.csv and report.json");
  sim_cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
  sim_cmd->add_option("--seed", seed, "override the scenario seed");
  sim_cmd->add_option("--out", out, std::string("output directory (default $") + kOutDirEnv + " or .)");

  VerifyArgs verify;
  auto* ver_cmd = app.add_subcommand("verify-theory", "compare the closed-form error model with its oracles");
  ver_cmd->add_option("--L", verify.L, "cell side(s), comma separated")->delimiter(',')->capture_default_str();
  ver_cmd->add_option("--R", verify.R, "node range (default L*sqrt(5)/2 per L)");
  ver_cmd->add_option("--samples", verify.samples, "Monte Carlo draws")->capture_default_str();
  ver_cmd->add_option("--seed", verify.seed, "seed")->capture_default_str();
  ver_cmd->add_option("--sim-samples", verify.sim_samples, "CG samples to simulate (0 skips)")->capture_default_str();
  ver_cmd->add_option("--replicates", verify.replicates, "simulation replicates")->capture_default_str();
  ver_cmd->add_option("--scenario", verify.scenario, "base scenario for the simulation (default paper defaults)");
  ver_cmd->add_option("--out", verify.out, "output directory for verify_theory.json");

  std::size_t replicates = 10, jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "paired replicates over the five NTL types");
  sweep_cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
  sweep_cmd->add_option("--replicates", replicates, "replicate count")->capture_default_str()->check(
      CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", seed, "override the scenario seed");
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out, std::string("output directory (default $") + kOutDirEnv + " or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan);
    if (*sim_cmd) return cmd_simulate(scenario, seed, out);
    if (*ver_cmd) return cmd_verify_theory(verify);
    if (*sweep_cmd) return cmd_sweep(scenario, replicates, seed, jobs, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PlanningError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
