#include "hdw/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hdw/verify.hpp"

namespace hdw {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

Binding parse_point(const std::string& text) {
  Binding b;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto z = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
    };
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw SchemaError("point '" + text + "': expected name=value pairs");
    }
    std::string name = trim(item.substr(0, eq));
    std::string value = trim(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      b.set(name, v);
    } catch (const std::logic_error&) {
      throw SchemaError("point '" + text + "': '" + value + "' is not a number");
    }
  }
  return b;
}

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

void print_table(const Chart& chart, const Expression& e,
                 const std::vector<Binding>& points, std::ostream& out) {
  if (points.empty()) return;
  std::vector<std::string> cols;
  for (const auto& n : chart.all_names()) {
    for (const auto& p : points) {
      if (p.contains(n)) {
        cols.push_back(n);
        break;
      }
    }
  }
  out << "  " << join(cols, " ") << (cols.empty() ? "" : " ") << "value\n";
  for (const auto& p : points) {
    out << " ";
    for (const auto& c : cols) {
      out << " " << (p.contains(c) ? format_number(p.get(c)) : std::string("-"));
    }
    out << " " << format_number(eval(e, p)) << "\n";
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

json norms_json(const std::vector<Norms>& ns) {
  json out = json::array();
  for (const auto& n : ns) {
    out.push_back({{"name", n.name}, {"max", n.max}, {"l2", n.l2}, {"count", n.count}});
  }
  return out;
}

json config_json(const SolverConfig& c) {
  return {{"dt", c.dt},
          {"K", c.K},
          {"x_min", c.x_min},
          {"x_max", c.x_max},
          {"t0", c.t0},
          {"t_final", c.t_final},
          {"boundary", to_string(c.boundary)},
          {"reconstruction", to_string(c.reconstruction)},
          {"snapshot_every", c.snapshot_every},
          {"newton_tol", c.newton_tol},
          {"newton_max_iter", c.newton_max_iter},
          {"scheme", c.scheme}};
}

std::function<double(double)> of_x(const Expression& e) {
  auto c = std::make_shared<CompiledExpression>(e, std::vector<std::string>{"x"});
  return [c](double x) { return (*c)(std::span<const double>(&x, 1)); };
}

std::vector<double> sample(const Expression& e, const std::vector<double>& x) {
  auto f = of_x(e);
  std::vector<double> out;
  for (double xi : x) out.push_back(f(xi));
  return out;
}

struct Written {
  std::string csv;
  std::string plot;
};

int simulate_ode(const ModelFile& mf, json& manifest, Written& w, int stride) {
  const Chart& chart = mf.chart;
  const int n = chart.n();
  OdeState s0{mf.solver.t0, mf.ode_u0, mf.ode_p0};
  SolverConfig c = mf.solver;
  OdeSystem sys(mf.h);
  std::vector<OdeState> traj{s0};
  const int steps = c.steps();
  const double dt = c.step_size();
  OdeState s = s0;
  for (int k = 0; k < steps; ++k) {
    s = step_ode_rk4(s, sys, dt);
    s.t = c.t0 + (k + 1) * dt;
    if ((k + 1) % c.snapshot_every == 0 || k + 1 == steps) traj.push_back(s);
  }
  std::ostringstream csv;
  std::vector<std::string> header{"t"};
  for (int a = 0; a < n; ++a) header.push_back(chart.u(a));
  for (int a = 0; a < n; ++a) header.push_back(chart.p(0, a));
  csv << join(header, ",") << "\n";
  std::ostringstream plot;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& st = traj[i];
    csv << format_number(st.t);
    for (double v : st.u) csv << "," << format_number(v);
    for (double v : st.p) csv << "," << format_number(v);
    csv << "\n";
    if (i % stride == 0) plot << format_number(st.t) << " " << format_number(st.u[0]) << "\n";
  }
  w.csv = csv.str();
  w.plot = plot.str();
  manifest["steps"] = steps;
  manifest["dt"] = dt;
  manifest["snapshots"] = traj.size();
  manifest["columns"] = header;
  manifest["energy"] = {{"initial", sys.energy(traj.front())},
                        {"final", sys.energy(traj.back())}};
  try {
    manifest["norms"] = norms_json(hdw_residual(traj, mf.h));
  } catch (const Error& e) {
    manifest["norms"] = json::array();
    manifest["notes"].push_back(std::string("residual norms unavailable: ") + e.what());
  }
  return kExitOk;
}

int simulate_field(const ModelFile& mf, json& manifest, Written& w, int stride) {
  FieldModel model = field_model_for(mf);
  SolverConfig c = mf.solver;
  if (!mf.reconstruction_given) {
    c.reconstruction = model.closed_form ? Reconstruction::ClosedForm
                                         : Reconstruction::Newton;
  }
  manifest["config"] = config_json(c);
  FieldSystem sys(model, c);
  std::vector<std::function<double(double)>> u0, M0;
  for (const auto& e : mf.u0) u0.push_back(of_x(e));
  for (const auto& e : mf.M0) M0.push_back(of_x(e));
  GridSection s0 = sys.initial_section(u0, M0);
  s0.t = c.t0;
  FieldRun run = evolve_field(model, c, s0);
  const int n = mf.chart.n();
  std::vector<std::string> header{"t", "x"};
  for (int a = 0; a < n; ++a) header.push_back(mf.chart.u(a));
  for (int a = 0; a < n; ++a) header.push_back("M" + std::to_string(a + 1));
  for (int a = 0; a < n; ++a) header.push_back("P" + std::to_string(a + 1));
  std::ostringstream csv, plot;
  csv << join(header, ",") << "\n";
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const auto& s = run.trajectory[i];
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      csv << format_number(s.t) << "," << format_number(s.x[k]);
      for (int a = 0; a < n; ++a) csv << "," << format_number(s.u[a][k]);
      for (int a = 0; a < n; ++a) csv << "," << format_number(s.M[a][k]);
      for (int a = 0; a < n; ++a) csv << "," << format_number(s.P[a][k]);
      csv << "\n";
      if (i % stride == 0 && k % stride == 0) {
        plot << format_number(s.t) << " " << format_number(s.x[k]) << " "
             << format_number(s.u[0][k]) << "\n";
      }
    }
    if (i % stride == 0) plot << "\n";
  }
  w.csv = csv.str();
  w.plot = plot.str();
  manifest["steps"] = run.steps;
  manifest["dt"] = run.dt;
  manifest["snapshots"] = run.trajectory.size();
  manifest["columns"] = header;
  manifest["warnings"] = run.warnings;
  try {
    manifest["norms"] = norms_json(hdw_residual(run.trajectory, mf.h, c.boundary));
  } catch (const Error& e) {
    manifest["norms"] = json::array();
    manifest["notes"].push_back(std::string("residual norms unavailable: ") + e.what());
  }
  return kExitOk;
}

int simulate_yang_mills(const ModelFile& mf, json& manifest, Written& w, int stride) {
  const YangMillsModel& ym = *mf.yang_mills;
  const SolverConfig& c = mf.solver;
  YangMillsSection s0;
  s0.t = c.t0;
  for (int k = 0; k < c.K; ++k) s0.x.push_back(c.grid_point(k));
  for (const auto& e : mf.A0) s0.A.push_back(sample(e, s0.x));
  for (const auto& e : mf.E0) s0.E.push_back(sample(e, s0.x));
  YangMillsRun run = evolve_yang_mills(ym, c, s0);
  const int n = ym.algebra.dim();
  std::vector<std::string> header{"t", "x"};
  for (int a = 0; a < n; ++a) header.push_back("A" + std::to_string(a + 1));
  for (int a = 0; a < n; ++a) header.push_back("E" + std::to_string(a + 1));
  std::ostringstream csv, plot;
  csv << join(header, ",") << "\n";
  double drift = 0.0;
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const auto& s = run.trajectory[i];
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      csv << format_number(s.t) << "," << format_number(s.x[k]);
      for (int a = 0; a < n; ++a) csv << "," << format_number(s.A[a][k]);
      for (int a = 0; a < n; ++a) {
        csv << "," << format_number(s.E[a][k]);
        drift = std::max(drift, std::fabs(s.E[a][k] - s0.E[a][k]));
      }
      csv << "\n";
      if (i % stride == 0 && k % stride == 0) {
        plot << format_number(s.t) << " " << format_number(s.x[k]) << " "
             << format_number(s.E[0][k]) << "\n";
      }
    }
    if (i % stride == 0) plot << "\n";
  }
  w.csv = csv.str();
  w.plot = plot.str();
  manifest["steps"] = run.steps;
  manifest["dt"] = run.dt;
  manifest["snapshots"] = run.trajectory.size();
  manifest["columns"] = header;
  manifest["electric_field_drift"] = drift;
  try {
    manifest["norms"] = norms_json(ym_residual(run.trajectory, ym, c.boundary));
  } catch (const Error& e) {
    manifest["norms"] = json::array();
    manifest["notes"].push_back(std::string("residual norms unavailable: ") + e.what());
  }
  return kExitOk;
}

}  // namespace

int cmd_bracket(const ModelFile& mf, const std::vector<std::string>& current_names,
                const std::vector<Binding>& extra_points, std::ostream& out) {
  std::vector<Binding> points = mf.points;
  points.insert(points.end(), extra_points.begin(), extra_points.end());
  const auto available = mf.current_names();
  if (available.empty()) throw SchemaError("model file defines no currents");
  for (const auto& name : current_names) {
    if (std::find(available.begin(), available.end(), name) == available.end()) {
      throw SchemaError("unknown current '" + name + "'; available: " +
                        join(available, ", "));
    }
  }
  auto wanted = [&](const std::string& name) {
    return current_names.empty() ||
           std::find(current_names.begin(), current_names.end(), name) !=
               current_names.end();
  };
  out << "model " << mf.name << " (m=" << mf.chart.m() << ", n=" << mf.chart.n()
      << ")\n";
  out << "H = " << mf.h.H().str() << "\n";
  for (const auto& f : mf.functions) {
    if (!wanted(f.name)) continue;
    Expression b = bracket_affine(f.f, mf.h);
    out << "current " << f.name << ": f = " << f.f.str() << "\n";
    out << "  {f,h} = " << b.str() << "\n";
    print_table(mf.chart, b, points, out);
  }
  for (const auto& c : mf.currents) {
    if (!wanted(c.name)) continue;
    Expression b = bracket_affine(c, mf.h);
    std::vector<std::string> ys, bs;
    for (const auto& y : c.Y) ys.push_back(y.str());
    for (const auto& e : c.beta) bs.push_back(e.str());
    out << "current " << c.name << ": Y = [" << join(ys, ", ") << "], beta = ["
        << join(bs, ", ") << "]\n";
    out << "  {c,h} = " << b.str() << "\n";
    print_table(mf.chart, b, points, out);
  }
  return kExitOk;
}

int cmd_simulate(const ModelFile& mf, const std::string& out_dir, std::ostream& out) {
  if (!mf.has_solver) throw SchemaError("simulate needs a 'solver' section");
  json manifest;
  manifest["model"] = mf.name;
  manifest["chart"] = {{"m", mf.chart.m()}, {"n", mf.chart.n()}};
  manifest["hamiltonian"] = mf.h.H().str();
  manifest["config"] = config_json(mf.solver);
  manifest["notes"] = json::array();
  Written w;
  const int stride = mf.output.plot_stride;
  if (mf.yang_mills) {
    if (mf.chart.m() != 2) throw SchemaError("Yang-Mills simulation needs m = 2");
    manifest["kind"] = "yang_mills";
    simulate_yang_mills(mf, manifest, w, stride);
  } else if (mf.chart.m() == 1) {
    manifest["kind"] = "ode";
    simulate_ode(mf, manifest, w, stride);
  } else if (mf.chart.m() == 2) {
    manifest["kind"] = "field";
    simulate_field(mf, manifest, w, stride);
  } else {
    throw SchemaError("simulate supports m = 1 and m = 2 charts only");
  }
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  json files = {{"csv", mf.output.csv}, {"manifest", mf.output.manifest}};
  write_file(dir / mf.output.csv, w.csv);
  if (!mf.output.plot.empty()) {
    write_file(dir / mf.output.plot, w.plot);
    files["plot"] = mf.output.plot;
  }
  manifest["files"] = files;
  write_file(dir / mf.output.manifest, manifest.dump(2) + "\n");
  out << "wrote " << (dir / mf.output.csv).string() << " and "
      << (dir / mf.output.manifest).string() << "\n";
  for (const auto& warning : manifest.value("warnings", json::array())) {
    out << "warning: " << warning.get<std::string>() << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, int levels,
               const std::string& out_dir, bool json_out, std::ostream& out) {
  const auto& known = suite_names();
  for (const auto& s : suites) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw SchemaError("unknown suite '" + s + "'; available: " + join(known, ", "));
    }
  }
  if (levels < 2) throw SchemaError("--levels must be >= 2");
  VerifyOptions o;
  o.seed = seed;
  o.levels = levels;
  std::vector<VerificationReport> reports;
  for (const auto& s : suites.empty() ? known : suites) {
    reports.push_back(run_suite(s, o));
  }
  bool all = true;
  for (const auto& r : reports) all = all && r.passed;
  if (json_out) {
    out << to_json(reports) << "\n";
  } else {
    for (const auto& r : reports) {
      out << (r.passed ? "PASS " : "FAIL ") << r.check
          << "  max_residual=" << format_number(r.max_residual) << "\n";
      for (const auto& m : r.measurements) {
        if (!m.passed) {
          out << "    failed: " << m.name << " = " << format_number(m.value)
              << " (" << m.kind << ", tolerance " << format_number(m.tolerance) << ")\n";
        }
      }
    }
    out << (all ? "all checks passed" : "some checks failed") << "\n";
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "verify_report.json",
               to_json(reports) + "\n");
  }
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_parse_check_expr(const std::string& text, std::ostream& out) {
  Expression e = parse(text);
  out << simplify(e).str() << "\n";
  return kExitOk;
}

int cmd_parse_check_model(const ModelFile& mf, std::ostream& out) {
  out << "model " << mf.name << " (m=" << mf.chart.m() << ", n=" << mf.chart.n()
      << ")\n";
  out << "H = " << mf.h.H().str() << "\n";
  for (const auto& name : mf.current_names()) out << "current " << name << "\n";
  out << "points " << mf.points.size() << "\n";
  out << "solver " << (mf.has_solver ? "yes" : "no") << "\n";
  out << "ok\n";
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Brackets, simulations and checks for first-order Hamiltonian field theories",
               "hdw"};
  app.require_subcommand(1);

  std::string model_path, out_dir = ".", expr_text;
  std::vector<std::string> current_names, suites, at;
  std::uint64_t seed = VerifyOptions{}.seed;
  int levels = VerifyOptions{}.levels;
  bool json_out = false;

  auto* bracket = app.add_subcommand("bracket", "print {c,h} for the currents of a model");
  bracket->add_option("--model", model_path, "model file (JSON)")->required();
  bracket->add_option("--current", current_names, "current name (default: all)");
  bracket->add_option("--at", at, "evaluation point, e.g. \"x1=0,u1=1,p1_1=0\"");

  auto* simulate = app.add_subcommand("simulate", "integrate a model and write CSV + manifest");
  simulate->add_option("--model", model_path, "model file (JSON)")->required();
  simulate->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suites, "suite name (default: all)");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--levels", levels, "refinement ladder length");
  verify->add_option("--out", out_dir, "directory for verify_report.json");
  verify->add_flag("--json", json_out, "print the full JSON report");

  auto* check = app.add_subcommand("parse-check", "parse and validate a model file or expression");
  auto* check_model = check->add_option("--model", model_path, "model file (JSON)");
  auto* check_expr = check->add_option("--expr", expr_text, "expression text");
  check_model->excludes(check_expr);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*bracket) {
      std::vector<Binding> points;
      for (const auto& p : at) points.push_back(parse_point(p));
      return cmd_bracket(load_model_file(model_path), current_names, points, out);
    }
    if (*simulate) return cmd_simulate(load_model_file(model_path), out_dir, out);
    if (*verify) {
      return cmd_verify(suites, seed, levels, verify->count("--out") ? out_dir : "",
                        json_out, out);
    }
    if (*check) {
      if (!expr_text.empty() || check_expr->count()) {
        return cmd_parse_check_expr(expr_text, out);
      }
      if (model_path.empty()) throw SchemaError("parse-check needs --model or --expr");
      return cmd_parse_check_model(load_model_file(model_path), out);
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace hdw
