#pragma once

// Scenario files (JSON) and the machine-readable outputs: trace CSV and the
// per-NTL metrics report JSON. Both output formats carry schema_version.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "gradeloc/engine.hpp"
#include "gradeloc/error.hpp"
#include "gradeloc/metrics.hpp"

namespace gradeloc {

inline constexpr int kSchemaVersion = 1;

// Raised for malformed scenario files; the message names the offending field.
class ScenarioError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

namespace detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError((path.empty() ? "<root>" : path) + ": expected an object");
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ScenarioError(join(path, key) + ": unknown key");
  }
}

inline const json& field(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(join(path, key) + ": missing required field");
  return *it;
}

inline double number(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_number()) throw ScenarioError(join(path, key) + ": expected a number");
  return v.get<double>();
}

inline std::size_t count(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ScenarioError(join(path, key) + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

inline bool flag(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_boolean()) throw ScenarioError(join(path, key) + ": expected true or false");
  return v.get<bool>();
}

inline std::string text(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_string()) throw ScenarioError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

inline ReceptionModel parse_reception(const json& j, const std::string& path) {
  require_object(j, path);
  const auto model = text(j, path, "model");
  if (model == "ideal_disk") {
    reject_unknown(j, path, {"model", "range_m"});
    return IdealDisk{number(j, path, "range_m")};
  }
  if (model == "bernoulli_disk") {
    reject_unknown(j, path, {"model", "range_m", "loss_prob"});
    return BernoulliDisk{number(j, path, "range_m"), number(j, path, "loss_prob")};
  }
  if (model == "distance_decay") {
    reject_unknown(j, path, {"model", "range_m", "reliable_radius_m"});
    return DistanceDecay{number(j, path, "reliable_radius_m"), number(j, path, "range_m")};
  }
  throw ScenarioError(join(path, "model") + ": expected ideal_disk, bernoulli_disk or distance_decay");
}

inline json reception_json(const ReceptionModel& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdealDisk>) {
          return {{"model", "ideal_disk"}, {"range_m", v.range}};
        } else if constexpr (std::is_same_v<T, BernoulliDisk>) {
          return {{"model", "bernoulli_disk"}, {"range_m", v.range}, {"loss_prob", v.loss_prob}};
        } else {
          return {{"model", "distance_decay"}, {"range_m", v.range}, {"reliable_radius_m", v.reliable_radius}};
        }
      },
      m);
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using namespace detail;
  require_object(j, "");
  reject_unknown(j, "", {"schema_version", "grid", "reception", "timing", "mobility", "tdoa", "run", "profiles"});
  if (count(j, "", "schema_version") != static_cast<std::size_t>(kSchemaVersion))
    throw ScenarioError("schema_version: unsupported version (expected " + std::to_string(kSchemaVersion) + ")");

  Scenario s;
  {
    const auto& g = field(j, "", "grid");
    require_object(g, "grid");
    reject_unknown(g, "grid", {"rows", "cols", "cell_side_m", "origin"});
    s.grid.rows = count(g, "grid", "rows");
    s.grid.cols = count(g, "grid", "cols");
    s.grid.cell_side = number(g, "grid", "cell_side_m");
    if (g.contains("origin")) {
      const auto& o = g["origin"];
      require_object(o, "grid.origin");
      reject_unknown(o, "grid.origin", {"x", "y"});
      s.grid.origin = {number(o, "grid.origin", "x"), number(o, "grid.origin", "y")};
    }
  }
  s.reception = parse_reception(field(j, "", "reception"), "reception");
  {
    const auto& t = field(j, "", "timing");
    require_object(t, "timing");
    reject_unknown(t, "timing", {"centroid_interval_s", "beacon_interval_s", "threshold"});
    s.centroid_interval = number(t, "timing", "centroid_interval_s");
    s.beacon_interval = number(t, "timing", "beacon_interval_s");
    s.threshold = number(t, "timing", "threshold");
  }
  {
    const auto& m = field(j, "", "mobility");
    require_object(m, "mobility");
    reject_unknown(m, "mobility", {"stride_min_m", "stride_max_m", "segment_steps"});
    s.mobility.stride_min = number(m, "mobility", "stride_min_m");
    s.mobility.stride_max = number(m, "mobility", "stride_max_m");
    s.mobility.segment_steps = count(m, "mobility", "segment_steps");
  }
  {
    const auto& t = field(j, "", "tdoa");
    require_object(t, "tdoa");
    reject_unknown(t, "tdoa", {"qmin_m", "qmax_m"});
    s.tdoa = {number(t, "tdoa", "qmin_m"), number(t, "tdoa", "qmax_m")};
  }
  {
    const auto& r = field(j, "", "run");
    require_object(r, "run");
    reject_unknown(r, "run", {"duration_s", "target_samples", "seed"});
    if (r.contains("duration_s")) s.duration = number(r, "run", "duration_s");
    if (r.contains("target_samples")) s.target_samples = count(r, "run", "target_samples");
    if (s.duration.has_value() == s.target_samples.has_value())
      throw ScenarioError("run: exactly one of duration_s and target_samples is required");
    s.seed = count(r, "run", "seed");
  }
  {
    const auto& ps = field(j, "", "profiles");
    if (!ps.is_array() || ps.empty()) throw ScenarioError("profiles: expected a non-empty array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string path = "profiles[" + std::to_string(i) + "]";
      const auto& p = ps[i];
      require_object(p, path);
      reject_unknown(p, path,
                     {"label", "coarse_grained", "fine_grained", "self_localize", "fine_cnt_limit", "sensors"});
      ProfileSpec spec;
      spec.label = text(p, path, "label");
      spec.profile.coarse_grained = flag(p, path, "coarse_grained");
      spec.profile.fine_grained = flag(p, path, "fine_grained");
      spec.profile.self_localize = flag(p, path, "self_localize");
      if (spec.profile.fine_grained) spec.profile.fine_cnt_limit = count(p, path, "fine_cnt_limit");
      else if (p.contains("fine_cnt_limit")) spec.profile.fine_cnt_limit = count(p, path, "fine_cnt_limit");
      if (spec.profile.self_localize) {
        const std::string sp = path + ".sensors";
        const auto& se = field(p, path, "sensors");
        require_object(se, sp);
        reject_unknown(se, sp, {"stride_accuracy", "detect_accuracy", "heading_error_deg"});
        spec.sensors = {number(se, sp, "stride_accuracy"), number(se, sp, "detect_accuracy"),
                        number(se, sp, "heading_error_deg")};
      } else if (p.contains("sensors")) {
        throw ScenarioError(path + ".sensors: only valid when self_localize is true");
      }
      s.profiles.push_back(std::move(spec));
    }
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
  return s;
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  json profiles = json::array();
  for (const auto& ps : s.profiles) {
    json p = {{"label", ps.label},
              {"coarse_grained", ps.profile.coarse_grained},
              {"fine_grained", ps.profile.fine_grained},
              {"self_localize", ps.profile.self_localize},
              {"fine_cnt_limit", ps.profile.fine_cnt_limit}};
    if (ps.profile.self_localize)
      p["sensors"] = {{"stride_accuracy", ps.sensors.stride_accuracy},
                      {"detect_accuracy", ps.sensors.detect_accuracy},
                      {"heading_error_deg", ps.sensors.heading_error_deg}};
    profiles.push_back(std::move(p));
  }
  json run = {{"seed", s.seed}};
  if (s.duration) run["duration_s"] = *s.duration;
  if (s.target_samples) run["target_samples"] = *s.target_samples;
  return {{"schema_version", kSchemaVersion},
          {"grid",
           {{"rows", s.grid.rows},
            {"cols", s.grid.cols},
            {"cell_side_m", s.grid.cell_side},
            {"origin", {{"x", s.grid.origin.x}, {"y", s.grid.origin.y}}}}},
          {"reception", detail::reception_json(s.reception)},
          {"timing",
           {{"centroid_interval_s", s.centroid_interval},
            {"beacon_interval_s", s.beacon_interval},
            {"threshold", s.threshold}}},
          {"mobility",
           {{"stride_min_m", s.mobility.stride_min},
            {"stride_max_m", s.mobility.stride_max},
            {"segment_steps", s.mobility.segment_steps}}},
          {"tdoa", {{"qmin_m", s.tdoa.qmin}, {"qmax_m", s.tdoa.qmax}}},
          {"run", run},
          {"profiles", profiles}};
}

inline constexpr const char* kTraceCsvHeader =
    "time_s,ntl_label,actual_x_m,actual_y_m,est_x_m,est_y_m,method,abs_error_m";

// Fixed 6-decimal formatting; rows for samples without an estimate leave the
// estimate and error columns empty.
inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceCsvHeader << '\n';
  char buf[256];
  for (const auto& s : trace.samples) {
    const auto& label = trace.labels.at(s.ntl);
    if (s.estimate.method == EstimateMethod::None) {
      std::snprintf(buf, sizeof buf, "%.3f,%s,%.6f,%.6f,,,none,\n", to_seconds(s.time), label.c_str(), s.actual.x,
                    s.actual.y);
    } else {
      std::snprintf(buf, sizeof buf, "%.3f,%s,%.6f,%.6f,%.6f,%.6f,%s,%.6f\n", to_seconds(s.time), label.c_str(),
                    s.actual.x, s.actual.y, s.estimate.pos.x, s.estimate.pos.y, to_string(s.estimate.method),
                    distance(s.estimate.pos, s.actual));
    }
    out << buf;
  }
}

inline nlohmann::json report_json(const MetricsReport& r) {
  nlohmann::json within = nlohmann::json::object();
  for (std::size_t i = 0; i < kErrorBounds.size(); ++i) within[std::to_string(i + 1)] = r.within_bound[i];
  return {{"n_samples", r.n_samples}, {"warmup_samples", r.warmup_samples},
          {"cle", r.cle},             {"mae", r.mae},
          {"rmse", r.rmse},           {"within_bound", within},
          {"fgl_count", r.fgl_count}, {"fgl_unavailable", r.fgl_unavailable}};
}

}  // namespace gradeloc
