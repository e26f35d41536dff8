#include "hdw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "hdw/compiled.hpp"
#include "hdw/models.hpp"

namespace hdw {

// ---------------------------------------------------------------------------
// Reports

void VerificationReport::measure_max(const std::string& name, double value,
                                     double tol) {
  Measurement m{name, value, tol, "max", 0.0, value <= tol};
  measurements.push_back(m);
}

void VerificationReport::measure_min(const std::string& name, double value,
                                     double bound) {
  Measurement m{name, value, bound, "min", 0.0, value >= bound};
  measurements.push_back(m);
}

void VerificationReport::measure_band(const std::string& name, double value,
                                      double target, double rel_tol) {
  Measurement m{name, value, rel_tol, "band", target,
                std::fabs(value - target) <= rel_tol * target};
  measurements.push_back(m);
}

void VerificationReport::measure_flag(const std::string& name, bool ok) {
  Measurement m{name, ok ? 1.0 : 0.0, 0.0, "flag", 1.0, ok};
  measurements.push_back(m);
}

void VerificationReport::finish() {
  passed = !measurements.empty();
  for (const auto& m : measurements) passed = passed && m.passed;
}

namespace {

nlohmann::json report_json(const VerificationReport& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["statement"] = r.statement;
  j["status"] = r.passed ? "pass" : "fail";
  j["max_residual"] = r.max_residual;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["seconds"] = r.seconds;
  j["measurements"] = nlohmann::json::array();
  for (const auto& m : r.measurements) {
    nlohmann::json jm;
    jm["name"] = m.name;
    jm["value"] = m.value;
    jm["kind"] = m.kind;
    jm["tolerance"] = m.tolerance;
    if (m.kind == "band" || m.kind == "flag") jm["target"] = m.target;
    jm["passed"] = m.passed;
    j["measurements"].push_back(jm);
  }
  j["levels"] = nlohmann::json::array();
  for (const auto& l : r.levels) {
    j["levels"].push_back(
        {{"label", l.label}, {"h", l.h}, {"residual", l.residual}, {"extra", l.extra}});
  }
  j["ratios"] = r.ratios;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string to_json(const VerificationReport& r, int indent) {
  return report_json(r).dump(indent);
}

std::string to_json(const std::vector<VerificationReport>& rs, int indent) {
  nlohmann::json j;
  j["reports"] = nlohmann::json::array();
  bool all = !rs.empty();
  for (const auto& r : rs) {
    j["reports"].push_back(report_json(r));
    all = all && r.passed;
  }
  j["status"] = all ? "pass" : "fail";
  return j.dump(indent);
}

// ---------------------------------------------------------------------------
// Polynomials

std::size_t Polynomial::index_of(const std::string& v) const {
  auto it = std::find(vars_.begin(), vars_.end(), v);
  if (it == vars_.end()) throw Error("polynomial has no variable '" + v + "'");
  return static_cast<std::size_t>(it - vars_.begin());
}

Polynomial Polynomial::constant(std::vector<std::string> vars, double c) {
  Polynomial p(std::move(vars));
  if (c != 0.0) p.coef_[std::vector<int>(p.vars_.size(), 0)] = c;
  return p;
}

Polynomial Polynomial::variable(std::vector<std::string> vars,
                                const std::string& v) {
  Polynomial p(std::move(vars));
  std::vector<int> e(p.vars_.size(), 0);
  e[p.index_of(v)] = 1;
  p.coef_[e] = 1.0;
  return p;
}

Polynomial Polynomial::random(std::vector<std::string> vars,
                              const std::vector<std::string>& active,
                              int degree, std::mt19937_64& rng) {
  Polynomial p(std::move(vars));
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::size_t> idx;
  for (const auto& v : active) idx.push_back(p.index_of(v));
  std::vector<int> e(p.vars_.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos == idx.size()) {
      p.coef_[e] = coef(rng);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[idx[pos]] = k;
      rec(pos + 1, left - k);
    }
    e[idx[pos]] = 0;
  };
  rec(0, degree);
  return p;
}

Polynomial Polynomial::derivative(const std::string& v) const {
  Polynomial out(vars_);
  auto it = std::find(vars_.begin(), vars_.end(), v);
  if (it == vars_.end()) return out;
  const std::size_t i = static_cast<std::size_t>(it - vars_.begin());
  for (const auto& [e, c] : coef_) {
    if (e[i] == 0) continue;
    auto d = e;
    d[i] -= 1;
    out.coef_[d] += c * e[i];
  }
  return out;
}

double Polynomial::eval(const Binding& b) const {
  std::vector<double> x(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    x[i] = b.contains(vars_[i]) ? b.get(vars_[i]) : 0.0;
  }
  double acc = 0.0;
  for (const auto& [e, c] : coef_) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    }
    acc += t;
  }
  return acc;
}

Expression Polynomial::to_expression() const {
  Expression acc;
  for (const auto& [e, c] : coef_) {
    Expression t(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) t = t * pow(Expression::variable(vars_[i]), e[i]);
    }
    acc = acc + t;
  }
  return simplify(acc);
}

namespace {

void require_same_vars(const Polynomial& a, const Polynomial& b) {
  if (a.vars() != b.vars()) throw Error("polynomials over different variables");
}

}  // namespace

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a, b);
  Polynomial out = a;
  for (const auto& [e, c] : b.coef_) out.coef_[e] += c;
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-1.0) * b;
}

Polynomial operator*(double s, const Polynomial& a) {
  Polynomial out = a;
  for (auto& [e, c] : out.coef_) c *= s;
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a, b);
  Polynomial out(a.vars_);
  for (const auto& [ea, ca] : a.coef_) {
    for (const auto& [eb, cb] : b.coef_) {
      auto e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out.coef_[e] += ca * cb;
    }
  }
  return out;
}

Current PolyCurrent::to_current(const std::string& name) const {
  Current c;
  c.name = name;
  for (const auto& y : Y) c.Y.push_back(y.to_expression());
  for (const auto& b : beta) c.beta.push_back(b.to_expression());
  return c;
}

PolyCurrent random_poly_current(const Chart& chart, int degree,
                                std::mt19937_64& rng) {
  auto vars = chart.all_names();
  std::vector<std::string> active = chart.base_names();
  active.insert(active.end(), chart.fiber_names().begin(),
                chart.fiber_names().end());
  PolyCurrent pc;
  for (int a = 0; a < chart.n(); ++a) {
    pc.Y.push_back(Polynomial::random(vars, active, degree, rng));
  }
  for (int i = 0; i < chart.m(); ++i) {
    pc.beta.push_back(Polynomial::random(vars, active, degree, rng));
  }
  return pc;
}

std::vector<Binding> random_bindings(const std::vector<std::string>& names,
                                     int count, double lo, double hi,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<Binding> out(count);
  for (auto& b : out) {
    for (const auto& n : names) b.set(n, d(rng));
  }
  return out;
}

PolyCurrent poly_current_bracket(const PolyCurrent& a, const PolyCurrent& b,
                                 const Chart& chart) {
  const int n = chart.n();
  const int m = chart.m();
  auto vars = chart.all_names();
  // Vertical field acting as a derivation on polynomials.
  auto apply = [&](const std::vector<Polynomial>& field, const Polynomial& f) {
    Polynomial acc(vars);
    for (int be = 0; be < n; ++be) acc = acc + field[be] * f.derivative(chart.u(be));
    return acc;
  };
  PolyCurrent out;
  for (int al = 0; al < n; ++al) {
    // [Y, Z]^alpha = Y(Z^alpha) - Z(Y^alpha)
    out.Y.push_back(-1.0 * (apply(a.Y, b.Y[al]) - apply(b.Y, a.Y[al])));
  }
  for (int i = 0; i < m; ++i) {
    // (i_Y d beta)^i = Y(beta^i) for a vertical Y and semibasic beta.
    out.beta.push_back(-1.0 * (apply(a.Y, b.beta[i]) - apply(b.Y, a.beta[i])));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs_diff(const Expression& a, const Expression& b,
                    const std::vector<Binding>& samples) {
  return max_abs_over(Expression::binary(Op::Sub, a, b), samples);
}

double max_abs_diff_poly(const Expression& e, const Polynomial& p,
                         const std::vector<Binding>& samples) {
  double worst = 0.0;
  for (const auto& b : samples) {
    worst = std::max(worst, std::fabs(eval(e, b) - p.eval(b)));
  }
  return worst;
}

void add_ratios(VerificationReport& r, double target, double rel_tol) {
  for (std::size_t k = 1; k < r.levels.size(); ++k) {
    double ratio = r.levels[k - 1].residual / r.levels[k].residual;
    r.ratios.push_back(ratio);
    r.measure_band("ratio " + r.levels[k - 1].label + " -> " + r.levels[k].label,
                   ratio, target, rel_tol);
  }
}

int ladder(const VerifyOptions& o) { return std::max(2, o.levels); }

Current make_current(const std::string& name, std::vector<std::string> Y,
                     std::vector<std::string> beta) {
  Current c;
  c.name = name;
  for (const auto& y : Y) c.Y.push_back(parse(y));
  for (const auto& b : beta) c.beta.push_back(parse(b));
  return c;
}

struct WaveRun {
  int K;
  double dx;
  FieldRun run;
  double error = 0.0;  // L-infinity error against sin(x - t) at T
};

WaveRun run_wave(int K, double T) {
  SolverConfig cfg;
  cfg.K = K;
  cfg.x_min = 0.0;
  cfg.x_max = 2 * std::numbers::pi;
  cfg.dt = cfg.dx() / 4;
  cfg.t_final = T;
  cfg.boundary = Boundary::Periodic;
  cfg.reconstruction = Reconstruction::ClosedForm;
  FieldModel model = wave_field_model();
  FieldSystem sys(model, cfg);
  GridSection s0 = sys.initial_section(
      {[](double x) { return std::sin(x); }},
      {[](double x) { return -std::cos(x); }});
  WaveRun w{K, cfg.dx(), evolve_field(model, cfg, s0)};
  const GridSection& last = w.run.trajectory.back();
  for (int k = 0; k < K; ++k) {
    w.error = std::max(w.error, std::fabs(last.u[0][k] - std::sin(last.x[k] - last.t)));
  }
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Bracket evolution residuals

double field_bracket_evolution_residual(const std::vector<GridSection>& traj,
                                        const Current& c,
                                        const HamiltonianSection& h,
                                        Boundary b) {
  if (traj.size() < 3) throw Error("residual needs at least 3 snapshots");
  const Chart& chart = h.chart();
  if (chart.m() != 2) throw Error("grid bracket residual needs m = 2");
  const int n = chart.n();
  const auto names = chart.all_names();
  auto d = d_current(c, chart);
  CompiledExpression c0(d.c0, names);
  std::vector<std::vector<CompiledExpression>> cu(n);
  std::vector<CompiledExpression> cp;
  for (int be = 0; be < n; ++be) {
    for (int i = 0; i < 2; ++i) cu[be].emplace_back(d.cu[be][i], names);
    cp.emplace_back(d.cp[be], names);
  }
  CompiledExpression bracket(bracket_affine(c, h), names);
  const double dt = traj[1].t - traj[0].t;
  const auto& x = traj[0].x;
  const int K = static_cast<int>(x.size());
  const double dx = x[1] - x[0];
  const int k0 = b == Boundary::Periodic ? 0 : 1;
  const int k1 = b == Boundary::Periodic ? K : K - 1;
  std::vector<double> values(names.size());
  double worst = 0.0;
  for (std::size_t s = 1; s + 1 < traj.size(); ++s) {
    if (std::fabs((traj[s + 1].t - traj[s].t) - dt) > 1e-9 * dt) {
      throw Error("bracket residual needs equally spaced snapshots");
    }
    const auto& cur = traj[s];
    std::vector<std::vector<double>> ux(n), Px(n);
    for (int a = 0; a < n; ++a) {
      ux[a] = grid_derivative(cur.u[a], dx, b);
      Px[a] = grid_derivative(cur.P[a], dx, b);
    }
    for (int k = k0; k < k1; ++k) {
      values[0] = cur.t;
      values[1] = x[k];
      for (int a = 0; a < n; ++a) {
        values[2 + a] = cur.u[a][k];
        values[2 + n + a] = cur.M[a][k];
        values[2 + 2 * n + a] = cur.P[a][k];
      }
      double pulled = c0(values);
      for (int a = 0; a < n; ++a) {
        double ut = (traj[s + 1].u[a][k] - traj[s - 1].u[a][k]) / (2 * dt);
        double Mt = (traj[s + 1].M[a][k] - traj[s - 1].M[a][k]) / (2 * dt);
        pulled += cu[a][0](values) * ut + cu[a][1](values) * ux[a][k];
        pulled += cp[a](values) * (Mt + Px[a][k]);
      }
      worst = std::max(worst, std::fabs(pulled - bracket(values)));
    }
  }
  return worst;
}

double ode_bracket_evolution_residual(const std::vector<OdeState>& traj,
                                      const Expression& f,
                                      const HamiltonianSection& h) {
  if (traj.size() < 5) throw Error("residual needs at least 5 snapshots");
  const Chart& chart = h.chart();
  const auto names = chart.all_names();
  CompiledExpression fc(f, names);
  CompiledExpression bracket(bracket_affine(f, h), names);
  const int n = chart.n();
  std::vector<double> fv(traj.size());
  std::vector<std::vector<double>> vals(traj.size(),
                                        std::vector<double>(1 + 2 * n));
  for (std::size_t s = 0; s < traj.size(); ++s) {
    vals[s][0] = traj[s].t;
    for (int a = 0; a < n; ++a) {
      vals[s][1 + a] = traj[s].u[a];
      vals[s][1 + n + a] = traj[s].p[a];
    }
    fv[s] = fc(vals[s]);
  }
  const double dt = traj[1].t - traj[0].t;
  double worst = 0.0;
  for (std::size_t s = 2; s + 2 < traj.size(); ++s) {
    double dfdt = (-fv[s + 2] + 8 * fv[s + 1] - 8 * fv[s - 1] + fv[s - 2]) / (12 * dt);
    worst = std::max(worst, std::fabs(dfdt - bracket(vals[s])));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Checks

VerificationReport check_representation(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "representation";
  r.statement =
      "currents act on Hamiltonian sections by an affine representation: "
      "{{a,b},h} = {a,{b,h}}_l - {b,{a,h}}_l";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  const int trials = 20;
  const int samples = 100;
  double worst = 0.0;
  double same = 0.0;
  double constant_h = 0.0;
  double constant_h_direct = 0.0;
  for (int t = 0; t < trials; ++t) {
    Current a = random_poly_current(chart, 2, rng).to_current("a");
    Current b = random_poly_current(chart, 2, rng).to_current("b");
    HamiltonianSection h(chart,
                         Polynomial::random(names, names, 2, rng).to_expression());
    auto pts = random_bindings(names, samples, -1.0, 1.0, rng);
    worst = std::max(worst, representation_residual(a, b, h, pts));
    same = std::max(same, representation_residual(a, a, h, pts));
    // Constant H: only the x-derivative part of {a,b} survives.
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    HamiltonianSection hc(chart, Expression(cd(rng)));
    constant_h = std::max(constant_h, representation_residual(a, b, hc, pts));
    Current ab = current_bracket(a, b, chart);
    constant_h_direct = std::max(
        constant_h_direct,
        max_abs_diff(bracket_affine(ab, hc), d_current(ab, chart).c0, pts));
    r.samples += samples;
  }
  r.max_residual = worst;
  r.measure_max("max residual, random currents and H", worst, 1e-9);
  r.measure_max("max residual, b = a", same, 1e-15);
  r.measure_max("max residual, constant H", constant_h, 1e-9);
  r.measure_max("bracket with constant H vs x-derivative term", constant_h_direct,
                1e-12);
  r.notes.push_back("20 trials x 100 samples; m=2, n=2; dense degree-2 "
                    "polynomials with coefficients in [-1,1]; samples in [-1,1]");
  r.seconds = seconds_since(t0);
  r.measure_max("runtime seconds", r.seconds, 10.0);
  r.finish();
  return r;
}

VerificationReport check_jacobi_currents(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "jacobi";
  r.statement =
      "the bracket of currents is a Lie bracket, equal to -([Y,Z], i_Y d beta - "
      "i_Z d alpha)";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 1);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  double jac = 0.0, anti = 0.0, oracle = 0.0, contraction = 0.0, repeated = 0.0;
  bool closed = true;
  for (int t = 0; t < 20; ++t) {
    PolyCurrent pa = random_poly_current(chart, 2, rng);
    PolyCurrent pb = random_poly_current(chart, 2, rng);
    PolyCurrent pc = random_poly_current(chart, 2, rng);
    Current a = pa.to_current("a"), b = pb.to_current("b"), c = pc.to_current("c");
    auto pts = random_bindings(names, 100, -1.0, 1.0, rng);
    Current ab = current_bracket(a, b, chart);
    Current bc = current_bracket(b, c, chart);
    Current ca = current_bracket(c, a, chart);
    Current cyc = current_bracket(ab, c, chart) + current_bracket(bc, a, chart) +
                  current_bracket(ca, b, chart);
    for (const auto& y : cyc.Y) jac = std::max(jac, max_abs_over(y, pts));
    for (const auto& e : cyc.beta) jac = std::max(jac, max_abs_over(e, pts));
    Current ba = current_bracket(b, a, chart);
    auto pts50 = std::vector<Binding>(pts.begin(), pts.begin() + 50);
    for (int k = 0; k < chart.n(); ++k) {
      anti = std::max(anti, max_abs_over(Expression::binary(Op::Add, ab.Y[k], ba.Y[k]), pts50));
    }
    for (int k = 0; k < chart.m(); ++k) {
      anti = std::max(anti, max_abs_over(Expression::binary(Op::Add, ab.beta[k], ba.beta[k]), pts50));
    }
    // Polynomial-arithmetic oracle.
    PolyCurrent pab = poly_current_bracket(pa, pb, chart);
    for (int k = 0; k < chart.n(); ++k) {
      oracle = std::max(oracle, max_abs_diff_poly(ab.Y[k], pab.Y[k], pts));
    }
    for (int k = 0; k < chart.m(); ++k) {
      oracle = std::max(oracle, max_abs_diff_poly(ab.beta[k], pab.beta[k], pts));
    }
    // Contraction route: {a,b}^{0i} = -(i_{H_a} d b^0)^i.
    auto field = hamiltonian_field(a, chart);
    auto db = d_current(b, chart);
    auto coeffs = current_coefficients(ab, chart);
    for (int i = 0; i < chart.m(); ++i) {
      Expression acc;
      for (int be = 0; be < chart.n(); ++be) {
        acc = acc + field.vu[be] * db.cu[be][i] + field.vp[i][be] * db.cp[be];
      }
      contraction = std::max(contraction,
                             max_abs_diff(coeffs[i], simplify(-acc), pts));
    }
    closed = closed && validate_current(ab, chart).valid;
    Current aa = current_bracket(a, a, chart);
    for (const auto& y : aa.Y) repeated = std::max(repeated, max_abs_over(y, pts));
    for (const auto& e : aa.beta) repeated = std::max(repeated, max_abs_over(e, pts));
    r.samples += 100;
  }
  r.max_residual = jac;
  r.measure_max("cyclic sum", jac, 1e-9);
  r.measure_max("antisymmetry", anti, 1e-12);
  r.measure_max("polynomial commutator oracle", oracle, 1e-12);
  r.measure_max("contraction with the Hamiltonian field", contraction, 1e-12);
  r.measure_max("repeated argument", repeated, 0.0);
  r.measure_flag("closure: brackets are currents", closed);
  r.seconds = seconds_since(t0);
  r.measure_max("runtime seconds", r.seconds, 10.0);
  r.finish();
  return r;
}

VerificationReport check_m1_reduction(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "m1_reduction";
  r.statement =
      "on a one-dimensional base the brackets are the time-dependent Poisson "
      "brackets {F,h} = dF/dt + {F,H} and {F,G}";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 2);
  Chart chart(1, 2);
  const auto names = chart.all_names();
  auto poisson = [&](const Polynomial& f, const Polynomial& g) {
    Polynomial acc(names);
    for (int a = 0; a < chart.n(); ++a) {
      acc = acc + f.derivative(chart.u(a)) * g.derivative(chart.p(0, a)) -
            f.derivative(chart.p(0, a)) * g.derivative(chart.u(a));
    }
    return acc;
  };
  double lin = 0.0, aff = 0.0, jac = 0.0, affine_forms = 0.0, rep = 0.0;
  bool self_zero = true;
  for (int t = 0; t < 20; ++t) {
    Polynomial pf = Polynomial::random(names, names, 3, rng);
    Polynomial pg = Polynomial::random(names, names, 3, rng);
    Polynomial pk = Polynomial::random(names, names, 3, rng);
    Polynomial pH = Polynomial::random(names, names, 2, rng);
    Expression f = pf.to_expression(), g = pg.to_expression(),
               k = pk.to_expression();
    HamiltonianSection h(chart, pH.to_expression());
    auto pts = random_bindings(names, 100, -1.0, 1.0, rng);
    lin = std::max(lin, max_abs_diff_poly(bracket_linear(f, g, chart),
                                          poisson(pf, pg), pts));
    aff = std::max(aff, max_abs_diff_poly(bracket_affine(f, h),
                                          pf.derivative(chart.x(0)) + poisson(pf, pH),
                                          pts));
    self_zero = self_zero && bracket_linear(f, f, chart).is_zero();
    Expression cyc = bracket_linear(bracket_linear(f, g, chart), k, chart) +
                     bracket_linear(bracket_linear(g, k, chart), f, chart) +
                     bracket_linear(bracket_linear(k, f, chart), g, chart);
    jac = std::max(jac, max_abs_over(cyc, pts));
    // A current (Y, beta) is the function Y p + beta; both forms must agree.
    PolyCurrent pc = random_poly_current(chart, 2, rng);
    Current c = pc.to_current("c");
    Expression fc = current_coefficients(c, chart)[0];
    affine_forms = std::max(affine_forms,
                            max_abs_diff(bracket_affine(c, h), bracket_affine(fc, h), pts));
    rep = std::max(rep, representation_residual(f, g, h, pts));
    r.samples += 100;
  }
  r.max_residual = std::max(lin, aff);
  r.measure_max("linear bracket vs canonical Poisson", lin, 1e-12);
  r.measure_max("affine bracket vs dF/dt + {F,H}", aff, 1e-12);
  r.measure_flag("{f,f} simplifies to 0", self_zero);
  r.measure_max("Jacobi for the Poisson bracket", jac, 1e-12);
  r.measure_max("current form vs function form", affine_forms, 1e-12);
  r.measure_max("representation identity", rep, 1e-9);
  r.notes.push_back("20 random pairs of degree-3 polynomials in (x1,u1,u2,p1_1,p1_2), "
                    "100 samples in [-1,1]; oracle by exact polynomial arithmetic");
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_sharp_roundtrip(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "sharp_roundtrip";
  r.statement = "the affine isomorphism and its inverse compose to the identity";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 3);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int m = dim(rng), n = dim(rng);
    PhaseComponents<double> pc;
    GammaSection<double> g;
    for (int a = 0; a < n; ++a) {
      pc.Au.push_back(d(rng));
      g.hp.push_back(d(rng));
    }
    pc.Ap.assign(m, std::vector<double>(n));
    g.hu.assign(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i) {
      for (int a = 0; a < n; ++a) {
        pc.Ap[i][a] = d(rng);
        g.hu[i][a] = d(rng);
      }
    }
    auto back = a_hat(sharp_aff(pc));
    auto fwd = sharp_aff(a_hat(g));
    for (int a = 0; a < n; ++a) {
      worst = std::max(worst, std::fabs(back.Au[a] - pc.Au[a]));
      worst = std::max(worst, std::fabs(fwd.hp[a] - g.hp[a]));
    }
    for (int i = 0; i < m; ++i) {
      for (int a = 0; a < n; ++a) {
        worst = std::max(worst, std::fabs(back.Ap[i][a] - pc.Ap[i][a]));
        worst = std::max(worst, std::fabs(fwd.hu[i][a] - g.hu[i][a]));
      }
    }
    r.samples += 2;
  }
  r.max_residual = worst;
  r.measure_max("round trip, 1000 random tuples each way", worst, 1e-15);
  // Gamma_h is the image of dh.
  Chart chart(2, 2);
  HamiltonianSection h(chart, parse("p1_1^2/2 + p2_2*u1 - x1*u2^2 + sin(u1)*p1_2"));
  auto g = gamma_h(h);
  auto pc = dh_components(h);
  bool same = true;
  for (int a = 0; a < 2; ++a) same = same && symbolically_equal(g.hp[a], -pc.Au[a]);
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < 2; ++a) same = same && symbolically_equal(g.hu[i][a], pc.Ap[i][a]);
  }
  r.measure_flag("gamma_h equals sharp_aff of dh", same);
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_ode_bracket_evolution(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "ode_evolution";
  r.statement =
      "along solutions of Hamilton's equations, d/dt (f o s) = {f, h} o s, and "
      "the discrete defect converges at the integrator order";
  r.seed = o.seed;
  HamiltonianSection h = model_td_mechanics(1, parse("u1^2/2"));
  Expression f = parse("u1^4 + u1*p1_1^3 + x1*u1*p1_1");
  OdeState s0{0.0, {1.0}, {0.0}};
  double drift = 0.0;
  for (int j = 0; j < ladder(o); ++j) {
    const double dt = 4e-3 / std::pow(2.0, j);
    auto traj = integrate_ode(s0, h, dt, 10.0);
    double res = ode_bracket_evolution_residual(traj, f, h);
    std::ostringstream label;
    label << "dt=" << dt;
    OdeSystem sys(h);
    double e0 = sys.energy(traj.front());
    double worst_drift = 0.0;
    for (const auto& s : traj) worst_drift = std::max(worst_drift, std::fabs(sys.energy(s) - e0));
    r.levels.push_back({label.str(), dt, res, worst_drift});
    drift = worst_drift;
    r.samples += static_cast<long>(traj.size());
  }
  add_ratios(r, 16.0, 0.2);
  r.max_residual = r.levels.back().residual;
  r.measure_max("residual at finest dt", r.levels.back().residual, 1e-8);
  r.measure_max("energy drift at finest dt over [0,10]", drift, 1e-8);
  r.notes.push_back("H = p1_1^2/2 + u1^2/2, (u,p)(0) = (1,0), t in [0,10]; "
                    "f = " + f.str() + "; d/dt by fourth-order central differences");
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_field_bracket_evolution(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "field_evolution";
  r.statement =
      "along solutions of the HdDW equations the pulled-back differential of a "
      "current equals its bracket with h; discrete defect converges at order 2";
  r.seed = o.seed;
  HamiltonianSection h = model_wave();
  Current momentum = make_current("momentum", {"1"}, {"0", "0"});
  double err128 = -1.0;
  for (int j = 0; j < ladder(o); ++j) {
    const int K = 64 << j;
    WaveRun w = run_wave(K, 1.0);
    double res = field_bracket_evolution_residual(w.run.trajectory, momentum, h,
                                                  Boundary::Periodic);
    r.levels.push_back({"K=" + std::to_string(K), w.dx, res, w.error});
    if (K == 128) err128 = w.error;
    r.samples += static_cast<long>(w.run.trajectory.size()) * K;
  }
  add_ratios(r, 4.0, 0.25);
  r.max_residual = r.levels.front().residual;
  if (err128 >= 0) {
    r.measure_max("L-infinity error vs sin(x - t) at K=128, T=1", err128, 1e-3);
  }
  r.notes.push_back("wave model H = M^2/2 - P^2/2, u0 = sin x, M0 = -cos x, periodic "
                    "on [0, 2pi), dt = dx/4, T = 1; current Y = (1), beta = 0");
  r.seconds = seconds_since(t0);
  r.measure_max("runtime seconds", r.seconds, 30.0);
  r.finish();
  return r;
}

VerificationReport check_field_converse(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "converse";
  r.statement =
      "a section that is not a solution violates the bracket evolution law for "
      "some current, and the defect does not vanish under refinement";
  r.seed = o.seed;
  HamiltonianSection h = model_wave();
  std::vector<Current> currents = {
      make_current("momentum", {"1"}, {"0", "0"}),
      make_current("displacement", {"0"}, {"u1", "0"})};
  const double eps = 1e-3;
  std::vector<std::vector<double>> res(currents.size()), clean(currents.size());
  for (int j = 0; j < ladder(o); ++j) {
    const int K = 64 << j;
    WaveRun w = run_wave(K, 1.0);
    auto traj = w.run.trajectory;
    for (auto& s : traj) {
      for (auto& v : s.M[0]) v += eps;
    }
    for (std::size_t c = 0; c < currents.size(); ++c) {
      res[c].push_back(field_bracket_evolution_residual(traj, currents[c], h,
                                                        Boundary::Periodic));
      clean[c].push_back(field_bracket_evolution_residual(
          w.run.trajectory, currents[c], h, Boundary::Periodic));
    }
  }
  // Pick the current with the largest defect on the finest grid.
  std::size_t best = 0;
  for (std::size_t c = 1; c < currents.size(); ++c) {
    if (res[c].back() > res[best].back()) best = c;
  }
  for (int j = 0; j < ladder(o); ++j) {
    const int K = 64 << j;
    r.levels.push_back({"K=" + std::to_string(K), 2 * std::numbers::pi / K,
                        res[best][j], clean[best][j]});
  }
  for (std::size_t c = 0; c < currents.size(); ++c) {
    std::ostringstream os;
    os << currents[c].name << ": corrupted";
    for (double v : res[c]) os << " " << v;
    os << "; unperturbed";
    for (double v : clean[c]) os << " " << v;
    r.notes.push_back(os.str());
  }
  r.notes.push_back("M perturbed by +1e-3 on every snapshot; detecting current: " +
                    currents[best].name);
  r.notes.push_back("a decrease is admitted only up to the discretization residual "
                    "of the same current on the unperturbed run at both levels");
  r.max_residual = res[best].back();
  r.measure_min("defect on finest grid", res[best].back(), 1e-4);
  double excess = -1.0;
  for (std::size_t j = 1; j < res[best].size(); ++j) {
    double drop = res[best][j - 1] - res[best][j];
    excess = std::max(excess, drop - clean[best][j - 1] - clean[best][j]);
  }
  r.measure_max("decrease beyond the unperturbed discretization residual", excess,
                0.0);
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_connection_class(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "connection_class";
  r.statement =
      "a connection is Hamiltonian for h iff its u-part is dH/dp and the trace "
      "of its momentum part is -dH/du; trace-free changes stay in the class";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 4);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  HamiltonianSection h(chart,
                       Polynomial::random(names, names, 2, rng).to_expression());
  auto pts = random_bindings(names, 50, -1.0, 1.0, rng);
  auto canonical = canonical_connection(h);
  Expression c = parse("x1*u2 + 3*p2_1 - 0.5");
  auto kernel = canonical;
  for (int a = 0; a < 2; ++a) {
    kernel.hp[0][a][0] = simplify(kernel.hp[0][a][0] + c);
    kernel.hp[1][a][1] = simplify(kernel.hp[1][a][1] - c);
    // Off-diagonal entries are unconstrained too.
    kernel.hp[0][a][1] = simplify(kernel.hp[0][a][1] + parse("u1*x2"));
  }
  auto trace = canonical;
  trace.hp[0][1][0] = simplify(trace.hp[0][1][0] + c);
  auto upart = canonical;
  upart.hu[1][0] = simplify(upart.hu[1][0] + parse("1"));
  r.measure_flag("canonical representative accepted",
                 connection_is_hamiltonian(canonical, h, pts).hamiltonian);
  r.measure_flag("trace-free perturbation accepted",
                 connection_is_hamiltonian(kernel, h, pts).hamiltonian);
  r.measure_flag("trace perturbation rejected",
                 !connection_is_hamiltonian(trace, h, pts).hamiltonian);
  r.measure_flag("u-part perturbation rejected",
                 !connection_is_hamiltonian(upart, h, pts).hamiltonian);
  // m = 1: the trace is the single entry.
  HamiltonianSection h1 = model_td_mechanics(1, parse("u1^2/2"));
  auto c1 = canonical_connection(h1);
  c1.hp[0][0][0] = simplify(c1.hp[0][0][0] + Expression(1.0));
  auto check1 = connection_is_hamiltonian(c1, h1, pts);
  r.measure_flag("m=1 perturbation by 1 rejected", !check1.hamiltonian);
  r.measure_band("m=1 residual", check1.max_residual, 1.0, 1e-15);
  r.samples = static_cast<long>(pts.size());
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_ym_conservation(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "ym_conservation";
  r.statement =
      "Yang-Mills in temporal gauge on 1+1 dimensions conserves the electric "
      "field and the Gauss constraint";
  r.seed = o.seed;
  // Abelian: constant E over 1000 steps.
  {
    YangMillsModel ym = model_yang_mills(LieAlgebraSpec::abelian(1), 2);
    SolverConfig cfg;
    cfg.K = 64;
    cfg.dt = cfg.dx() / 4;
    cfg.t_final = 1000 * cfg.dt;
    YangMillsSection s;
    for (int k = 0; k < cfg.K; ++k) s.x.push_back(cfg.grid_point(k));
    s.A.assign(1, std::vector<double>(cfg.K));
    s.E.assign(1, std::vector<double>(cfg.K, 0.7));
    for (int k = 0; k < cfg.K; ++k) s.A[0][k] = 0.3 * std::sin(s.x[k]);
    auto run = evolve_yang_mills(ym, cfg, s);
    double drift = 0.0;
    for (const auto& snap : run.trajectory) {
      for (double e : snap.E[0]) drift = std::max(drift, std::fabs(e - 0.7));
    }
    r.measure_flag("abelian run has 1000 steps", run.steps == 1000);
    r.measure_max("abelian: max |E(t) - E(0)| over 1000 steps", drift, 1e-12);
    auto res = ym_residual(run.trajectory, ym, cfg.boundary);
    r.measure_max("abelian: field equation residual", res[0].max, 1e-9);
    r.measure_max("abelian: Gauss residual", res[1].max, 1e-12);
    // Zero data stays zero.
    YangMillsSection z = s;
    for (auto& v : z.A[0]) v = 0.0;
    for (auto& v : z.E[0]) v = 0.0;
    cfg.t_final = 10 * cfg.dt;
    auto zr = evolve_yang_mills(ym, cfg, z);
    double zmax = 0.0;
    for (double v : zr.trajectory.back().A[0]) zmax = std::max(zmax, std::fabs(v));
    for (double v : zr.trajectory.back().E[0]) zmax = std::max(zmax, std::fabs(v));
    r.measure_max("zero data stays zero", zmax, 0.0);
  }
  // su(2): covariantly constant E, discrete Gauss residual at order 2.
  {
    YangMillsModel ym = model_yang_mills(LieAlgebraSpec::su2(), 2);
    const double kwave = 1.0;
    for (int j = 0; j < ladder(o); ++j) {
      SolverConfig cfg;
      cfg.K = 64 << j;
      cfg.dt = cfg.dx() / 4;
      cfg.t_final = 1.0;
      YangMillsSection s;
      for (int k = 0; k < cfg.K; ++k) s.x.push_back(cfg.grid_point(k));
      s.A.assign(3, std::vector<double>(cfg.K, 0.0));
      s.E.assign(3, std::vector<double>(cfg.K, 0.0));
      for (int k = 0; k < cfg.K; ++k) {
        s.A[2][k] = kwave;
        s.E[0][k] = std::cos(kwave * s.x[k]);
        s.E[1][k] = -std::sin(kwave * s.x[k]);
      }
      auto run = evolve_yang_mills(ym, cfg, s);
      auto g = gauss_residual(run.trajectory.back(), ym, cfg.boundary);
      auto res = ym_residual(run.trajectory, ym, cfg.boundary);
      r.levels.push_back({"K=" + std::to_string(cfg.K), cfg.dx(), g.max, res[2].max});
    }
    add_ratios(r, 4.0, 0.25);
    double evo = 0.0;
    for (const auto& l : r.levels) evo = std::max(evo, l.extra);
    r.measure_max("su2: max |dE/dt|", evo, 1e-12);
    r.notes.push_back(
        "Gauss convergence uses su(2) data A^3 = 1, E = (cos x, -sin x, 0), which "
        "satisfies the continuum Gauss law; abelian data satisfying it have "
        "constant E and a roundoff-level discrete residual");
  }
  r.max_residual = r.levels.empty() ? 0.0 : r.levels.back().residual;
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

namespace {

// Random expressions whose only singular points are avoided by construction:
// ln, sqrt, division and negative powers act on 1 + (.)^2.
Expression random_expression(int depth, const std::vector<std::string>& vars,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> cst(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  if (depth == 0 || coin(rng) < 0.25) {
    if (coin(rng) < 0.7) return Expression::variable(vars[pick(rng)]);
    return Expression(std::round(cst(rng) * 100) / 100);
  }
  auto sub = [&] { return random_expression(depth - 1, vars, rng); };
  auto positive = [&] {
    return Expression::binary(Op::Add, Expression(1.0), Expression::power(sub(), 2));
  };
  std::uniform_int_distribution<int> op(0, 11);
  switch (op(rng)) {
    case 0: return Expression::binary(Op::Add, sub(), sub());
    case 1: return Expression::binary(Op::Sub, sub(), sub());
    case 2:
    case 3: return Expression::binary(Op::Mul, sub(), sub());
    case 4: return Expression::binary(Op::Div, sub(), positive());
    case 5: return Expression::power(sub(), std::uniform_int_distribution<int>(2, 3)(rng));
    case 6: return Expression::power(positive(), -std::uniform_int_distribution<int>(1, 2)(rng));
    case 7: return Expression::unary(Op::Sin, sub());
    case 8: return Expression::unary(Op::Cos, sub());
    case 9: return Expression::unary(Op::Exp, sub());
    case 10: return Expression::unary(Op::Ln, positive());
    default: return Expression::unary(Op::Sqrt, positive());
  }
}

}  // namespace

VerificationReport check_derivatives(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "derivatives";
  r.statement = "symbolic derivatives agree with central finite differences";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 5);
  const std::vector<std::string> vars = {"x1", "u1", "p1_1"};
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  const double h = 1e-6;
  double worst = 0.0;
  int accepted = 0, skipped = 0;
  while (accepted < 500) {
    Expression e = random_expression(4, vars, rng);
    const std::string& v = vars[pick(rng)];
    Binding b;
    for (const auto& name : vars) b.set(name, val(rng));
    double f0 = eval(e, b);
    if (!std::isfinite(f0) || std::fabs(f0) > 1e4) {
      ++skipped;  // overflow region of nested exponentials
      continue;
    }
    double d = eval(diff(e, v), b);
    Binding bp = b, bm = b;
    bp.set(v, b.get(v) + h);
    bm.set(v, b.get(v) - h);
    double fd = (eval(e, bp) - eval(e, bm)) / (2 * h);
    worst = std::max(worst, std::fabs(d - fd) / (1.0 + std::fabs(d)));
    ++accepted;
  }
  r.samples = accepted;
  r.max_residual = worst;
  r.measure_max("max |d - FD| / (1 + |d|), 500 triples", worst, 1e-5);
  r.notes.push_back("h = 1e-6; bindings in [-2,2]; " + std::to_string(skipped) +
                    " draws with |f| > 1e4 skipped");
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

VerificationReport check_perfect_gas(const VerifyOptions& o) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "perfect_gas";
  r.statement =
      "the perfect-gas state relation between deformation and momentum is "
      "invertible, and eps + N p sqrt(det g) = (1 + N(gamma-1)) eps";
  r.seed = o.seed;
  std::mt19937_64 rng(o.seed + 6);
  ContinuumSpec spec;
  spec.g = {{1.21}};
  spec.rho = 1.3;
  spec.entropy = 0.2;
  spec.gas = GasConstants{1.4, 1.0, 1.0, 0.0, 1.0};
  PerfectGas gas(spec);
  const double gm = spec.gas->gamma;
  const int N = 1;
  std::uniform_real_distribution<double> dF(0.5, 2.0);
  // Pressure from thermodynamics: p sqrt g = -d(F eps(F))/dF.
  Expression eps = gas.internal_energy_expr("F");
  Expression pressure = simplify(-diff(Expression::variable("F") * eps, "F"));
  HamiltonianSection H = gas.hamiltonian();
  Expression dHdP = diff(H.H(), "p2_1");
  double trip = 0.0, bisect = 0.0, identity = 0.0, legendre = 0.0, law = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double F = dF(rng);
    const double P = gas.momentum(F);
    trip = std::max(trip, std::fabs(gas.deformation(P) - F));
    // Bisection oracle on the forward map, which is decreasing in F.
    double lo = 0.05, hi = 20.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (gas.momentum(mid) > P ? lo : hi) = mid;
    }
    bisect = std::max(bisect, std::fabs(gas.deformation(P) - 0.5 * (lo + hi)));
    const double e = eval(eps, {{"F", F}});
    const double p = eval(pressure, {{"F", F}});
    identity = std::max(identity,
                        std::fabs((e + N * p) - (1 + N * (gm - 1)) * e) /
                            std::max(1.0, std::fabs(e)));
    law = std::max(law, std::fabs(p - gas.pressure_density(F)) / std::max(1.0, p));
    legendre = std::max(legendre,
                        std::fabs(eval(dHdP, {{"x1", 0}, {"x2", 0}, {"u1", 0},
                                              {"p1_1", 0}, {"p2_1", P}}) -
                                  F));
  }
  r.samples = 100;
  r.max_residual = trip;
  r.measure_max("F round trip", trip, 1e-10);
  r.measure_max("inverse vs bisection oracle", bisect, 1e-10);
  r.measure_max("dH/dP at P(F) recovers F", legendre, 1e-10);
  r.measure_max("pressure law p sqrt g = (gamma-1) eps", law, 1e-12);
  r.measure_max("eps + N p sqrt g = (1 + N(gamma-1)) eps", identity, 1e-12);
  // gamma = 1: no pressure, relation not invertible.
  ContinuumSpec iso = spec;
  iso.gas->gamma = 1.0;
  PerfectGas gas1(iso);
  bool threw = false;
  try {
    gas1.deformation(1.0);
  } catch (const DomainError&) {
    threw = true;
  }
  r.measure_flag("gamma = 1: inversion reports non-invertibility", threw);
  r.measure_max("gamma = 1: pressure vanishes", std::fabs(gas1.pressure_density(1.3)), 0.0);
  r.measure_max("gamma = 1: energy is kinetic + internal",
                std::fabs(gas1.energy(0.4, 1.3) -
                          (0.16 / (2 * 1.21 * 1.3) + gas1.internal_energy(1.3))),
                1e-14);
  r.notes.push_back("gamma = 1.4, eps0 = 1, rho0 = 1, s0 = 0, cv = 1, g = 1.21, "
                    "reference density 1.3, entropy density 0.2; F uniform in [0.5, 2]");
  r.seconds = seconds_since(t0);
  r.finish();
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "representation", "jacobi",          "m1_reduction",
      "sharp_roundtrip", "ode_evolution",  "field_evolution",
      "converse",       "connection_class", "ym_conservation",
      "derivatives",    "perfect_gas"};
  return names;
}

VerificationReport run_suite(const std::string& name, const VerifyOptions& o) {
  if (name == "representation") return check_representation(o);
  if (name == "jacobi") return check_jacobi_currents(o);
  if (name == "m1_reduction") return check_m1_reduction(o);
  if (name == "sharp_roundtrip") return check_sharp_roundtrip(o);
  if (name == "ode_evolution") return check_ode_bracket_evolution(o);
  if (name == "field_evolution") return check_field_bracket_evolution(o);
  if (name == "converse") return check_field_converse(o);
  if (name == "connection_class") return check_connection_class(o);
  if (name == "ym_conservation") return check_ym_conservation(o);
  if (name == "derivatives") return check_derivatives(o);
  if (name == "perfect_gas") return check_perfect_gas(o);
  std::string list;
  for (const auto& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
  throw Error("unknown suite '" + name + "'; available: " + list);
}

}  // namespace hdw
