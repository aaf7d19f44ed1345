// Command-line front end: verification suites, convergence studies and
// plot-ready series over the registered transport cases.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "iim/iim.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

void parse_common(CLI::App* cmd, iim::RunConfig& rc, std::string& config_path) {
  cmd->add_option("--case", rc.case_id, "case id (see `iim cases`)");
  cmd->add_option("--preset", rc.preset, "quick | default | thorough")
      ->check(CLI::IsMember({"quick", "default", "thorough"}));
  cmd->add_option("--seed", rc.seed, "seed for the randomized checks");
  cmd->add_option("--dt", rc.dt, "override the ODE step (absolute, time units)");
  cmd->add_option("--cells", rc.cells, "override quadrature cells per axis");
  cmd->add_option("--order", rc.order, "Gauss-Legendre points per cell (2..32)");
  cmd->add_option("--t-final", rc.t_final, "override the case final time T");
  cmd->add_option("--out", rc.out_path, "output file (default: stdout)");
  cmd->add_option("--config", config_path, "flat key=value file; flags take precedence");
}

// Flat key=value configuration; values on the command line win.
void apply_config_file(const std::string& path, CLI::App* cmd, iim::RunConfig& rc) {
  std::ifstream f(path);
  if (!f) throw iim::invalid_input_error("cannot open config file '" + path + "'");
  auto unset = [&](const std::string& flag) {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = v.find_last_not_of(" \t\r");
      return v.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw iim::invalid_input_error("config line " + std::to_string(lineno) +
                                     ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key == "case") {
      if (unset("--case")) rc.case_id = val;
    } else if (key == "preset") {
      if (unset("--preset")) rc.preset = val;
    } else if (key == "seed") {
      if (unset("--seed")) rc.seed = std::stoull(val);
    } else if (key == "dt") {
      if (unset("--dt")) rc.dt = std::stod(val);
    } else if (key == "cells") {
      if (unset("--cells")) rc.cells = std::stoi(val);
    } else if (key == "order") {
      if (unset("--order")) rc.order = std::stoi(val);
    } else if (key == "t-final") {
      if (unset("--t-final")) rc.t_final = std::stod(val);
    } else if (key == "out") {
      if (unset("--out")) rc.out_path = val;
    } else if (key == "format") {
      if (unset("--format")) rc.format = val;
    } else if (key == "quantity") {
      if (unset("--quantity")) rc.quantity = val;
    } else if (key == "levels") {
      if (unset("--levels")) rc.levels = std::stoi(val);
    } else {
      throw iim::invalid_input_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                     key + "'");
    }
  }
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    iim::write_text_file(path, content);
}

nlohmann::json config_echo(const iim::RunConfig& rc, const iim::Resolution& res, double t_final) {
  nlohmann::json j;
  j["case"] = rc.case_id;
  j["preset"] = res.preset_name;
  j["seed"] = rc.seed;
  j["dt"] = res.dt_for(t_final);
  j["cells_1d"] = res.cells_1d;
  j["cells_2d"] = res.cells_2d;
  j["order"] = res.order;
  j["time_points"] = res.n_times;
  j["slack_scale"] = res.slack_scale;
  j["drift_pairs"] = res.drift_pairs;
  j["t_final"] = t_final;
  j["format"] = rc.format;
  return j;
}

double case_t_final(const iim::RunConfig& rc) {
  const iim::AnyCase c = iim::make_case(rc.case_id, rc.t_final);
  return std::visit([](const auto& cc) { return cc.t_final; }, c);
}

int cmd_verify(const iim::RunConfig& rc) {
  const iim::Resolution res = rc.resolve();
  const double T = case_t_final(rc);

  iim::Report report;
  report.suite = iim::run_suite(rc.case_id, rc.seed, res, rc.timings, rc.t_final);
  report.pass = report.suite.pass;
  report.config = config_echo(rc, res, T);

  emit(rc.out_path, rc.format == "csv" ? iim::checks_to_csv(report)
                                       : iim::serialize_report(report));

  int failed = 0;
  for (const auto& c : report.suite.checks)
    if (!c.pass) ++failed;
  std::ostringstream msg;
  msg << "case " << rc.case_id << ": " << report.suite.checks.size() << " checks, " << failed
      << " failed -> " << (report.pass ? "PASS" : "FAIL") << "\n";
  std::cerr << msg.str();
  return report.pass ? kExitPass : kExitCheckFailure;
}

int cmd_converge(const iim::RunConfig& rc) {
  if (rc.levels < 2 || rc.levels > 6)
    throw iim::invalid_input_error("levels must be in [2, 6]");
  const iim::Resolution res = rc.resolve();
  const iim::AnyCase any = iim::make_case(rc.case_id, rc.t_final);

  std::ostringstream os;
  os << "# iim " << iim::version << " convergence study, case=" << rc.case_id << "\n";
  os << "# columns: dt (time units), max_abs_drift (relative), observed_order\n";
  std::visit(
      [&](const auto& c) {
        constexpr int D = std::decay_t<decltype(c)>::dim;
        const double T = c.t_final;
        const auto grid = iim::uniform_grid(0.0, T, 9);
        const iim::QuadSpec qs{res.template cells<D>(), res.order};
        double prev = 0.0;
        for (int lvl = 0; lvl < rc.levels; ++lvl) {
          const double dt = res.dt_for(T) * std::pow(2.0, rc.levels - 1 - lvl);
          iim::SolutionField<D> sf{c.canonical_u0, c.field, T, iim::ODEConfig{dt}};
          const auto ds = iim::invariant_drift(sf, c.canonical_psi, c.omega, grid, qs);
          std::string order = "n/a";
          if (lvl > 0) {
            if (ds.max_abs_drift < 1e-14 && prev < 1e-14)
              order = "exact";
            else
              order = iim::csv_double(std::log2(prev / std::max(ds.max_abs_drift, 1e-300)));
          }
          os << iim::csv_double(dt) << "," << iim::csv_double(ds.max_abs_drift) << "," << order
             << "\n";
          prev = ds.max_abs_drift;
        }
      },
      any);
  emit(rc.out_path, os.str());
  return kExitPass;
}

int cmd_series(const iim::RunConfig& rc) {
  const iim::Resolution res = rc.resolve();
  const iim::AnyCase any = iim::make_case(rc.case_id, rc.t_final);

  std::ostringstream os;
  std::visit(
      [&](const auto& c) {
        constexpr int D = std::decay_t<decltype(c)>::dim;
        const double T = c.t_final;
        const iim::ODEConfig cfg{res.dt_for(T)};
        const auto grid = iim::uniform_grid(0.0, T, res.n_times);
        const iim::QuadSpec qs{res.template cells<D>(), res.order};

        if (rc.quantity == "drift") {
          iim::SolutionField<D> sf{c.canonical_u0, c.field, T, cfg};
          const auto ds = iim::invariant_drift(sf, c.canonical_psi, c.omega, grid, qs);
          os << "# iim " << iim::version << " series: drift, case=" << rc.case_id << "\n";
          os << "# columns: t (time units), pairing (L2 pairing units), drift (relative)\n";
          for (const auto& p : ds.points)
            os << iim::csv_double(p.t) << "," << iim::csv_double(p.pairing) << ","
               << iim::csv_double(p.drift) << "\n";
        } else if (rc.quantity == "l2-profile" || rc.quantity == "lq-profile") {
          // the time quadrature of the lq profile needs at least 33 points
          const auto dense = rc.quantity == "lq-profile" && res.n_times < 33
                                 ? iim::uniform_grid(0.0, T, 33)
                                 : grid;
          const auto rule =
              iim::build_reference(c.canonical_u0.support_box, res.template cells<D>(), res.order, 0.0);
          const auto pushed = iim::push_series(rule, c.field, dense, cfg);
          const auto series =
              iim::detail::solution_series<D>(c.field, c.canonical_u0, nullptr, pushed, cfg);
          if (rc.quantity == "l2-profile") {
            os << "# iim " << iim::version << " series: l2-profile, case=" << rc.case_id << "\n";
            os << "# columns: t (time units), l2_norm (L2 units)\n";
            for (std::size_t k = 0; k < dense.size(); ++k)
              os << iim::csv_double(dense[k]) << "," << iim::csv_double(series.l2_u[k]) << "\n";
          } else {
            const std::array<double, 7> qsq{1, 2, 4, 8, 16, 32, 64};
            auto reg = iim::regularity_profile(c, dense, series.l2_u, series.l2_u[0], qsq, res);
            os << "# iim " << iim::version << " series: lq-profile, case=" << rc.case_id << "\n";
            os << "# columns: q (dimensionless), lq_norm (L2 units), "
                  "normalized lq_norm/T^(1/q) (L2 units, non-decreasing in q), bound (L2 units)\n";
            for (std::size_t i = 0; i < reg.profile.lq_norms.size(); ++i) {
              const auto& [q, v] = reg.profile.lq_norms[i];
              const double bound =
                  std::pow(T, 1.0 / q) * std::exp(c.bounds.M_A * T / 2.0) * series.l2_u[0];
              os << iim::csv_double(q) << "," << iim::csv_double(v) << ","
                 << iim::csv_double(v / std::pow(T, 1.0 / q)) << "," << iim::csv_double(bound)
                 << "\n";
            }
          }
        } else if (rc.quantity == "measure") {
          const auto rule = iim::build_reference(c.omega, res.template cells<D>(), res.order, T);
          // march away from the anchor T
          std::vector<double> desc(grid.rbegin(), grid.rend());
          const auto pushed = iim::push_series(rule, c.field, desc, cfg);
          os << "# iim " << iim::version << " series: measure, case=" << rc.case_id << "\n";
          os << "# columns: t (time units), measure (volume units)\n";
          for (std::size_t k = pushed.size(); k-- > 0;)
            os << iim::csv_double(pushed[k].t) << "," << iim::csv_double(iim::weight_sum(pushed[k]))
               << "\n";
        } else {
          throw iim::invalid_input_error("unknown quantity '" + rc.quantity + "'");
        }
      },
      any);
  emit(rc.out_path, os.str());
  return kExitPass;
}

int cmd_cases() {
  for (const auto& s : iim::list_cases()) {
    std::printf("%-16s d=%d  T=%-8g L_A=%-8g M_A=%-8g  %s\n", s.id.c_str(), s.dim, s.t_final,
                s.bounds.L_A, s.bounds.M_A, s.notes.c_str());
  }
  return kExitPass;
}

int run_main(int argc, char** argv) {
  CLI::App app{"semi-Lagrangian transport kernel and estimate verification harness"};
  app.require_subcommand(1);

  iim::RunConfig rc;
  std::string config_path;

  auto* verify = app.add_subcommand("verify", "run the full check suite and write a report");
  parse_common(verify, rc, config_path);
  verify->add_option("--format", rc.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  verify->add_flag("--timings", rc.timings, "include wall-clock timings (breaks byte determinism)");

  auto* converge = app.add_subcommand("converge", "invariant drift under dt refinement");
  parse_common(converge, rc, config_path);
  converge->add_option("--levels", rc.levels, "number of dt halvings (2..6)");

  auto* series = app.add_subcommand("series", "emit a plot-ready table");
  parse_common(series, rc, config_path);
  series->add_option("--quantity", rc.quantity, "drift | l2-profile | lq-profile | measure")
      ->check(CLI::IsMember({"drift", "l2-profile", "lq-profile", "measure"}));

  auto* cases = app.add_subcommand("cases", "list the registered cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (cases->parsed()) return cmd_cases();
    CLI::App* active = verify->parsed() ? verify : converge->parsed() ? converge : series;
    if (!config_path.empty()) apply_config_file(config_path, active, rc);
    if (rc.case_id.empty()) {
      std::cerr << "error: no case given (--case or config file)\n";
      return kExitUsage;
    }
    if (verify->parsed()) return cmd_verify(rc);
    if (converge->parsed()) return cmd_converge(rc);
    if (series->parsed()) return cmd_series(rc);
    return kExitUsage;
  } catch (const iim::not_found_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const iim::invalid_input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return kExitRuntime;
  }
}
