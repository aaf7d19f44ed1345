#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iim/errors.hpp"
#include "iim/suite.hpp"
#include "iim/version.hpp"

namespace iim {

struct RunConfig {
  std::string case_id;
  std::string preset = "default";
  std::uint64_t seed = 1;
  std::optional<double> dt;       // overrides the preset value when set
  std::optional<int> cells;
  std::optional<int> order;
  std::optional<double> t_final;
  std::string out_path;
  std::string format = "json";    // json | csv
  std::string quantity = "drift";
  int levels = 3;
  bool timings = false;

  /// Preset table with any explicit overrides applied.
  Resolution resolve() const {
    Resolution r = Resolution::from_name(preset);
    if (dt) {
      if (!(*dt > 0.0)) throw invalid_input_error("dt must be positive");
      r.dt_absolute = *dt;
    }
    if (cells) {
      if (*cells < 1) throw invalid_input_error("cells must be >= 1");
      r.cells_1d = r.cells_2d = *cells;
    }
    if (order) r.order = *order;
    return r;
  }
};

/// Full verification report. Serializes to a single JSON document with
/// schema "iim-report/1"; parse(write(report)) round-trips exactly.
struct Report {
  std::string schema = report_schema;
  std::string tool_version = version;
  nlohmann::json config;  // echo of the resolved run configuration
  SuiteResult suite;
  bool pass = false;
};

inline const char* provenance_name(BoundsProvenance p) {
  return p == BoundsProvenance::analytic ? "analytic" : "sampled";
}

inline nlohmann::json to_json(const FieldBounds& b) {
  return {{"L_A", b.L_A},
          {"M_A", b.M_A},
          {"alpha", b.alpha},
          {"beta", b.beta},
          {"provenance", provenance_name(b.provenance)}};
}

inline FieldBounds bounds_from_json(const nlohmann::json& j) {
  FieldBounds b;
  b.L_A = j.at("L_A").get<double>();
  b.M_A = j.at("M_A").get<double>();
  b.alpha = j.at("alpha").get<double>();
  b.beta = j.at("beta").get<double>();
  b.provenance = j.at("provenance").get<std::string>() == "analytic" ? BoundsProvenance::analytic
                                                                     : BoundsProvenance::sampled;
  return b;
}

template <int D>
nlohmann::json to_json(const FlowResult<D>& r) {
  return {{"endpoint", std::vector<double>(r.endpoint.c.begin(), r.endpoint.c.end())},
          {"displacement", std::vector<double>(r.displacement.c.begin(), r.displacement.c.end())},
          {"log_jacobian", r.log_jacobian},
          {"n_steps", r.n_steps},
          {"t_from", r.t_from},
          {"t_to", r.t_to}};
}

template <int D>
FlowResult<D> flow_result_from_json(const nlohmann::json& j) {
  FlowResult<D> r;
  const auto e = j.at("endpoint").get<std::vector<double>>();
  const auto d = j.at("displacement").get<std::vector<double>>();
  if (e.size() != D || d.size() != D)
    throw invalid_input_error("flow result dimension mismatch");
  for (int i = 0; i < D; ++i) {
    r.endpoint[i] = e[static_cast<std::size_t>(i)];
    r.displacement[i] = d[static_cast<std::size_t>(i)];
  }
  r.log_jacobian = j.at("log_jacobian").get<double>();
  r.n_steps = j.at("n_steps").get<long>();
  r.t_from = j.at("t_from").get<double>();
  r.t_to = j.at("t_to").get<double>();
  return r;
}

inline nlohmann::json to_json(const BoundCheck& c) {
  return {{"name", c.name},   {"lhs", c.lhs},     {"rhs", c.rhs},        {"ratio", c.ratio},
          {"slack", c.slack}, {"pass", c.pass},   {"context", c.context}};
}

inline BoundCheck check_from_json(const nlohmann::json& j) {
  BoundCheck c;
  c.name = j.at("name").get<std::string>();
  c.lhs = j.at("lhs").get<double>();
  c.rhs = j.at("rhs").get<double>();
  c.ratio = j.at("ratio").get<double>();
  c.slack = j.at("slack").get<double>();
  c.pass = j.at("pass").get<bool>();
  c.context = j.at("context").get<std::string>();
  return c;
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = r.schema;
  j["tool_version"] = r.tool_version;
  j["config"] = r.config;
  j["bounds"] = {{"analytic", to_json(r.suite.analytic)}, {"sampled", to_json(r.suite.sampled)}};

  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.suite.checks) checks.push_back(to_json(c));
  j["checks"] = checks;

  nlohmann::json drift = nlohmann::json::array();
  for (const auto& p : r.suite.drift.points) drift.push_back({p.t, p.pairing, p.drift});
  j["drift"] = {{"baseline", r.suite.drift.baseline},
                {"max_abs_drift", r.suite.drift.max_abs_drift},
                {"series", drift}};

  nlohmann::json lq = nlohmann::json::array();
  for (const auto& [q, v] : r.suite.profile.lq_norms) lq.push_back({q, v});
  j["regularity"] = {{"time_grid", r.suite.profile.time_grid},
                     {"l2_at_t", r.suite.profile.l2_at_t},
                     {"lq_norms", lq},
                     {"sup_norm", r.suite.profile.sup_norm}};

  j["margins"] = {{"psi_support", r.suite.psi_margin}, {"u0_containment", r.suite.u0_margin}};
  j["case"] = {{"id", r.suite.case_id}, {"dim", r.suite.dim}};
  j["pass"] = r.pass;

  if (!r.suite.timings_ms.empty()) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, ms] : r.suite.timings_ms) t[name] = ms;
    j["timings_ms"] = t;
  }
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != report_schema)
    throw invalid_input_error("unsupported report schema '" + r.schema + "'");
  r.tool_version = j.at("tool_version").get<std::string>();
  r.config = j.at("config");
  r.suite.analytic = bounds_from_json(j.at("bounds").at("analytic"));
  r.suite.sampled = bounds_from_json(j.at("bounds").at("sampled"));
  for (const auto& cj : j.at("checks")) r.suite.checks.push_back(check_from_json(cj));
  r.suite.drift.baseline = j.at("drift").at("baseline").get<double>();
  r.suite.drift.max_abs_drift = j.at("drift").at("max_abs_drift").get<double>();
  for (const auto& pj : j.at("drift").at("series"))
    r.suite.drift.points.push_back({pj.at(0).get<double>(), pj.at(1).get<double>(), pj.at(2).get<double>()});
  r.suite.profile.time_grid = j.at("regularity").at("time_grid").get<std::vector<double>>();
  r.suite.profile.l2_at_t = j.at("regularity").at("l2_at_t").get<std::vector<double>>();
  for (const auto& qj : j.at("regularity").at("lq_norms"))
    r.suite.profile.lq_norms.emplace_back(qj.at(0).get<double>(), qj.at(1).get<double>());
  r.suite.profile.sup_norm = j.at("regularity").at("sup_norm").get<double>();
  r.suite.psi_margin = j.at("margins").at("psi_support").get<double>();
  r.suite.u0_margin = j.at("margins").at("u0_containment").get<double>();
  r.suite.case_id = j.at("case").at("id").get<std::string>();
  r.suite.dim = j.at("case").at("dim").get<int>();
  r.pass = j.at("pass").get<bool>();
  if (j.contains("timings_ms"))
    for (const auto& [k, v] : j.at("timings_ms").items())
      r.suite.timings_ms.emplace_back(k, v.get<double>());
  r.suite.pass = r.pass;
  return r;
}

inline std::string serialize_report(const Report& r) { return to_json(r).dump(2) + "\n"; }

/// CSV cell with enough digits to round-trip a double.
inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Checks table as CSV (the tabular alternative to the JSON report).
inline std::string checks_to_csv(const Report& r) {
  std::ostringstream os;
  os << "# iim " << version << " verification checks, case=" << r.suite.case_id << "\n";
  os << "# columns: name, lhs, rhs, ratio (dimensionless), slack, pass, context\n";
  for (const auto& c : r.suite.checks) {
    std::string ctx = c.context;
    for (auto& ch : ctx)
      if (ch == ',') ch = ';';
    os << c.name << "," << csv_double(c.lhs) << "," << csv_double(c.rhs) << ","
       << csv_double(c.ratio) << "," << csv_double(c.slack) << "," << (c.pass ? 1 : 0) << "," << ctx
       << "\n";
  }
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw error("failed writing output file '" + path + "'");
}

}  // namespace iim
