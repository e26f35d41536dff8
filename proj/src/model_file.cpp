#include "hdw/model_file.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace hdw {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw SchemaError(where + ": unknown key '" + k + "' (allowed: " + list + ")");
    }
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

Expression get_expression(const json& j, const std::string& where) {
  if (j.is_number()) return Expression(j.get<double>());
  std::string text = get_string(j, where);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

std::vector<Expression> get_expressions(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a list");
  std::vector<Expression> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_expression(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> get_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Matrix get_matrix(const json& j, const std::string& where) {
  if (j.is_number()) return {{j.get<double>()}};
  if (!j.is_array()) throw SchemaError(where + ": expected a matrix");
  Matrix out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_numbers(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void load_builtin(ModelFile& mf, const json& spec) {
  json params = spec.is_string() ? json::object({{"name", spec}}) : spec;
  if (!params.is_object() || !params.contains("name")) {
    throw SchemaError("model: expected a name or an object with a name");
  }
  const std::string name = get_string(params["name"], "model.name");
  mf.name = name;
  if (name == "td_mechanics") {
    require_keys(params, "model", {"name", "n", "potential"});
    int n = params.contains("n") ? get_int(params["n"], "model.n") : 1;
    if (n < 1) throw SchemaError("model.n: must be >= 1");
    Expression V;
    if (params.contains("potential")) {
      V = get_expression(params["potential"], "model.potential");
    } else {
      for (int a = 0; a < n; ++a) {
        V = V + pow(Expression::variable("u" + std::to_string(a + 1)), 2) / 2.0;
      }
    }
    mf.h = model_td_mechanics(n, V);
  } else if (name == "wave" || name == "elasticity_simple") {
    require_keys(params, "model", {"name", "N", "rho", "g", "G"});
    ContinuumSpec cs;
    if (params.contains("N")) {
      if (name == "wave") throw SchemaError("model: wave has N = 1");
      cs.N = get_int(params["N"], "model.N");
      cs.g = identity_matrix(cs.N);
      cs.G = identity_matrix(cs.N);
    }
    if (params.contains("rho")) cs.rho = get_expression(params["rho"], "model.rho");
    if (params.contains("g")) cs.g = get_matrix(params["g"], "model.g");
    if (params.contains("G")) cs.G = get_matrix(params["G"], "model.G");
    cs.validate();
    mf.h = name == "wave" ? model_wave(cs) : model_elasticity_simple(cs);
    mf.continuum = cs;
  } else if (name == "perfect_gas") {
    require_keys(params, "model",
                 {"name", "rho", "entropy", "g", "gamma", "eps0", "rho0", "s0", "cv"});
    ContinuumSpec cs;
    GasConstants gc;
    if (params.contains("rho")) cs.rho = get_expression(params["rho"], "model.rho");
    if (params.contains("entropy")) {
      cs.entropy = get_expression(params["entropy"], "model.entropy");
    }
    if (params.contains("g")) cs.g = {{get_number(params["g"], "model.g")}};
    if (params.contains("gamma")) gc.gamma = get_number(params["gamma"], "model.gamma");
    if (params.contains("eps0")) gc.eps0 = get_number(params["eps0"], "model.eps0");
    if (params.contains("rho0")) gc.rho0 = get_number(params["rho0"], "model.rho0");
    if (params.contains("s0")) gc.s0 = get_number(params["s0"], "model.s0");
    if (params.contains("cv")) gc.cv = get_number(params["cv"], "model.cv");
    cs.gas = gc;
    cs.validate();
    mf.h = PerfectGas(cs).hamiltonian();
    mf.continuum = cs;
  } else if (name == "yang_mills_abelian" || name == "yang_mills_su2") {
    require_keys(params, "model", {"name", "m", "n", "metric"});
    int m = params.contains("m") ? get_int(params["m"], "model.m") : 2;
    std::vector<double> metric;
    if (params.contains("metric")) metric = get_numbers(params["metric"], "model.metric");
    LieAlgebraSpec la = LieAlgebraSpec::su2();
    if (name == "yang_mills_abelian") {
      int n = params.contains("n") ? get_int(params["n"], "model.n") : 1;
      if (n < 1) throw SchemaError("model.n: must be >= 1");
      la = LieAlgebraSpec::abelian(n);
    } else if (params.contains("n")) {
      throw SchemaError("model: su(2) has dimension 3");
    }
    mf.yang_mills = model_yang_mills(la, m, metric);
    mf.h = mf.yang_mills->h;
  } else {
    std::string list;
    for (const auto& b : builtin_model_names()) list += (list.empty() ? "" : ", ") + b;
    throw SchemaError("model: unknown builtin '" + name + "' (available: " + list + ")");
  }
  mf.chart = mf.h.chart();
}

void load_solver(ModelFile& mf, const json& j) {
  require_keys(j, "solver",
               {"dt", "K", "x_min", "x_max", "t0", "t_final", "boundary",
                "reconstruction", "snapshot_every", "newton_tol",
                "newton_max_iter", "scheme"});
  SolverConfig& c = mf.solver;
  if (!j.contains("dt")) throw SchemaError("solver: missing 'dt'");
  c.dt = get_number(j["dt"], "solver.dt");
  if (j.contains("K")) c.K = get_int(j["K"], "solver.K");
  if (j.contains("x_min")) c.x_min = get_number(j["x_min"], "solver.x_min");
  if (j.contains("x_max")) c.x_max = get_number(j["x_max"], "solver.x_max");
  if (j.contains("t0")) c.t0 = get_number(j["t0"], "solver.t0");
  if (j.contains("t_final")) c.t_final = get_number(j["t_final"], "solver.t_final");
  try {
    if (j.contains("boundary")) {
      c.boundary = parse_boundary(get_string(j["boundary"], "solver.boundary"));
    }
    if (j.contains("reconstruction")) {
      c.reconstruction = parse_reconstruction(
          get_string(j["reconstruction"], "solver.reconstruction"));
      mf.reconstruction_given = true;
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(std::string("solver: ") + e.what());
  }
  if (j.contains("snapshot_every")) {
    c.snapshot_every = get_int(j["snapshot_every"], "solver.snapshot_every");
  }
  if (j.contains("newton_tol")) c.newton_tol = get_number(j["newton_tol"], "solver.newton_tol");
  if (j.contains("newton_max_iter")) {
    c.newton_max_iter = get_int(j["newton_max_iter"], "solver.newton_max_iter");
  }
  if (j.contains("scheme")) c.scheme = get_string(j["scheme"], "solver.scheme");
  try {
    c.validate();
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  mf.has_solver = true;
}

void check_initial_scope(const std::vector<Expression>& es, const std::string& where) {
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (const auto& v : es[i].variables()) {
      if (v != "x") {
        throw SchemaError(where + "[" + std::to_string(i) +
                          "]: initial data may only depend on x, found '" + v + "'");
      }
    }
  }
}

void load_initial(ModelFile& mf, const json& j) {
  const int n = mf.chart.n();
  auto sized = [&](std::size_t got, std::size_t want, const std::string& where) {
    if (got != want) {
      throw SchemaError(where + ": expected " + std::to_string(want) +
                        " entries, got " + std::to_string(got));
    }
  };
  if (mf.yang_mills) {
    require_keys(j, "initial", {"A", "E"});
    const std::size_t d = mf.yang_mills->algebra.dim();
    mf.A0 = j.contains("A") ? get_expressions(j["A"], "initial.A")
                            : std::vector<Expression>(d, 0.0);
    mf.E0 = j.contains("E") ? get_expressions(j["E"], "initial.E")
                            : std::vector<Expression>(d, 0.0);
    sized(mf.A0.size(), d, "initial.A");
    sized(mf.E0.size(), d, "initial.E");
    check_initial_scope(mf.A0, "initial.A");
    check_initial_scope(mf.E0, "initial.E");
  } else if (mf.chart.m() == 1) {
    require_keys(j, "initial", {"u", "p"});
    mf.ode_u0 = j.contains("u") ? get_numbers(j["u"], "initial.u")
                                : std::vector<double>(n, 0.0);
    mf.ode_p0 = j.contains("p") ? get_numbers(j["p"], "initial.p")
                                : std::vector<double>(n, 0.0);
    sized(mf.ode_u0.size(), n, "initial.u");
    sized(mf.ode_p0.size(), n, "initial.p");
  } else {
    require_keys(j, "initial", {"u", "M"});
    mf.u0 = j.contains("u") ? get_expressions(j["u"], "initial.u")
                            : std::vector<Expression>(n, 0.0);
    mf.M0 = j.contains("M") ? get_expressions(j["M"], "initial.M")
                            : std::vector<Expression>(n, 0.0);
    sized(mf.u0.size(), n, "initial.u");
    sized(mf.M0.size(), n, "initial.M");
    check_initial_scope(mf.u0, "initial.u");
    check_initial_scope(mf.M0, "initial.M");
  }
}

void load_currents(ModelFile& mf, const json& j) {
  if (!j.is_array()) throw SchemaError("currents: expected a list");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "currents[" + std::to_string(i) + "]";
    const json& c = j[i];
    if (!c.is_object() || !c.contains("name")) {
      throw SchemaError(where + ": expected an object with a name");
    }
    std::string name = get_string(c["name"], where + ".name");
    if (!seen.insert(name).second) {
      throw SchemaError(where + ": duplicate current name '" + name + "'");
    }
    if (mf.chart.m() == 1) {
      require_keys(c, where, {"name", "f"});
      if (!c.contains("f")) throw SchemaError(where + ": m = 1 currents need 'f'");
      Expression f = get_expression(c["f"], where + ".f");
      try {
        mf.chart.check_scope(f, true, "current " + name);
      } catch (const Error& e) {
        throw SchemaError(where + ": " + e.what());
      }
      mf.functions.push_back({name, f});
    } else {
      require_keys(c, where, {"name", "Y", "beta"});
      Current cur;
      cur.name = name;
      cur.Y = c.contains("Y") ? get_expressions(c["Y"], where + ".Y")
                              : std::vector<Expression>(mf.chart.n(), 0.0);
      cur.beta = c.contains("beta") ? get_expressions(c["beta"], where + ".beta")
                                    : std::vector<Expression>(mf.chart.m(), 0.0);
      auto v = validate_current(cur, mf.chart);
      if (!v.valid) throw SchemaError(where + ": " + v.message);
      mf.currents.push_back(cur);
    }
  }
}

void load_points(ModelFile& mf, const json& j) {
  if (!j.is_array()) throw SchemaError("points: expected a list");
  const auto names = mf.chart.all_names();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    if (!j[i].is_object()) throw SchemaError(where + ": expected an object");
    Binding b;
    for (const auto& [k, v] : j[i].items()) {
      if (std::find(names.begin(), names.end(), k) == names.end()) {
        throw SchemaError(where + ": '" + k + "' is not a chart coordinate");
      }
      b.set(k, get_number(v, where + "." + k));
    }
    mf.points.push_back(b);
  }
}

void load_output(ModelFile& mf, const json& j) {
  require_keys(j, "output", {"csv", "manifest", "plot", "plot_stride"});
  if (j.contains("csv")) mf.output.csv = get_string(j["csv"], "output.csv");
  if (j.contains("manifest")) {
    mf.output.manifest = get_string(j["manifest"], "output.manifest");
  }
  if (j.contains("plot")) mf.output.plot = get_string(j["plot"], "output.plot");
  if (j.contains("plot_stride")) {
    mf.output.plot_stride = get_int(j["plot_stride"], "output.plot_stride");
    if (mf.output.plot_stride < 1) throw SchemaError("output.plot_stride: must be >= 1");
  }
}

}  // namespace

std::vector<std::string> ModelFile::current_names() const {
  std::vector<std::string> out;
  for (const auto& c : currents) out.push_back(c.name);
  for (const auto& f : functions) out.push_back(f.name);
  return out;
}

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names = {
      "td_mechanics", "wave", "perfect_gas", "elasticity_simple",
      "yang_mills_abelian", "yang_mills_su2"};
  return names;
}

ModelFile parse_model_file(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  require_keys(j, "model file",
               {"model", "chart", "hamiltonian", "currents", "points", "solver",
                "initial", "output"});
  ModelFile mf;
  if (j.contains("model")) {
    if (j.contains("chart") || j.contains("hamiltonian")) {
      throw SchemaError("model file: give either 'model' or 'chart' + 'hamiltonian'");
    }
    load_builtin(mf, j["model"]);
  } else {
    if (!j.contains("chart") || !j.contains("hamiltonian")) {
      throw SchemaError("model file: needs 'model' or both 'chart' and 'hamiltonian'");
    }
    require_keys(j["chart"], "chart", {"m", "n"});
    if (!j["chart"].contains("m") || !j["chart"].contains("n")) {
      throw SchemaError("chart: needs 'm' and 'n'");
    }
    int m = get_int(j["chart"]["m"], "chart.m");
    int n = get_int(j["chart"]["n"], "chart.n");
    if (m < 1 || n < 1) throw SchemaError("chart: m and n must be >= 1");
    mf.name = "custom";
    mf.chart = Chart(m, n);
    Expression H = get_expression(j["hamiltonian"], "hamiltonian");
    try {
      mf.h = HamiltonianSection(mf.chart, H);
    } catch (const Error& e) {
      throw SchemaError(std::string("hamiltonian: ") + e.what());
    }
  }
  if (j.contains("currents")) load_currents(mf, j["currents"]);
  if (j.contains("points")) load_points(mf, j["points"]);
  if (j.contains("solver")) load_solver(mf, j["solver"]);
  if (j.contains("output")) load_output(mf, j["output"]);
  load_initial(mf, j.contains("initial") ? j["initial"] : json::object());
  return mf;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_file(ss.str());
}

FieldModel field_model_for(const ModelFile& mf) {
  if (mf.name == "wave" || (mf.name == "elasticity_simple" && mf.continuum &&
                            mf.continuum->N == 1)) {
    return wave_field_model(*mf.continuum);
  }
  if (mf.name == "perfect_gas") return perfect_gas_field_model(PerfectGas(*mf.continuum));
  return field_model(mf.name, mf.h);
}

}  // namespace hdw
