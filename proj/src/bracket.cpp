#include "hdw/bracket.hpp"

#include <cmath>
#include <limits>

#include "hdw/compiled.hpp"

namespace hdw {

namespace {

void require_one_dimensional(const Chart& chart, const char* what) {
  if (chart.m() != 1) {
    throw Error(std::string(what) +
                ": plain-function form needs a one-dimensional base (m=1)");
  }
}

}  // namespace

double max_abs_over(const Expression& e, const std::vector<Binding>& samples) {
  if (e.is_constant()) return std::fabs(e.value());
  auto names = e.variables();
  std::vector<std::string> slots(names.begin(), names.end());
  CompiledExpression f(e, slots);
  std::vector<double> values(slots.size());
  double worst = 0.0;
  for (const auto& b : samples) {
    for (std::size_t k = 0; k < slots.size(); ++k) values[k] = b.get(slots[k]);
    double v = std::fabs(f(values));
    if (std::isnan(v)) return v;
    worst = std::max(worst, v);
  }
  return worst;
}

PhaseComponents<Expression> dh_components(const HamiltonianSection& h) {
  const Chart& c = h.chart();
  PhaseComponents<Expression> pc;
  for (int a = 0; a < c.n(); ++a) pc.Au.push_back(diff(h.H(), c.u(a)));
  pc.Ap.assign(c.m(), std::vector<Expression>(c.n()));
  for (int i = 0; i < c.m(); ++i) {
    for (int a = 0; a < c.n(); ++a) pc.Ap[i][a] = diff(h.H(), c.p(i, a));
  }
  return pc;
}

GammaSection<Expression> gamma_h(const HamiltonianSection& h) {
  auto g = sharp_aff(dh_components(h));
  for (auto& e : g.hp) e = simplify(e);
  return g;
}

ConnectionCoefficients canonical_connection(const HamiltonianSection& h) {
  const Chart& c = h.chart();
  auto g = gamma_h(h);
  ConnectionCoefficients cc;
  cc.hu = g.hu;
  cc.hp.assign(c.m(), std::vector<std::vector<Expression>>(
                          c.n(), std::vector<Expression>(c.m())));
  for (int i = 0; i < c.m(); ++i) {
    for (int a = 0; a < c.n(); ++a) {
      cc.hp[i][a][i] = simplify(g.hp[a] / Expression(c.m()));
    }
  }
  return cc;
}

ConnectionCheck connection_is_hamiltonian(const ConnectionCoefficients& cc,
                                          const HamiltonianSection& h,
                                          const std::vector<Binding>& samples,
                                          double tolerance) {
  const Chart& c = h.chart();
  const auto m = static_cast<std::size_t>(c.m());
  const auto n = static_cast<std::size_t>(c.n());
  if (cc.hu.size() != m || cc.hp.size() != m) {
    throw Error("connection coefficients must have " + std::to_string(m) +
                " base rows");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (cc.hu[i].size() != n || cc.hp[i].size() != n) {
      throw Error("connection coefficients must have " + std::to_string(n) +
                  " fiber columns");
    }
    for (const auto& row : cc.hp[i]) {
      if (row.size() != m) {
        throw Error("momentum connection coefficients must be shaped (m,n,m)");
      }
    }
  }
  auto g = gamma_h(h);
  std::vector<Expression> defects;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      defects.push_back(simplify(cc.hu[i][a] - g.hu[i][a]));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    Expression trace;
    for (std::size_t i = 0; i < m; ++i) trace = trace + cc.hp[i][a][i];
    defects.push_back(simplify(trace - g.hp[a]));
  }
  ConnectionCheck r;
  bool all_zero = true;
  for (const auto& d : defects) all_zero = all_zero && d.is_zero();
  if (all_zero) {
    r.hamiltonian = true;
    r.symbolic = true;
    return r;
  }
  bool decidable = true;
  for (const auto& d : defects) {
    if (d.is_zero()) continue;
    if (!d.is_constant() && samples.empty()) {
      decidable = false;
      continue;
    }
    double v = max_abs_over(d, samples);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    r.max_residual = std::max(r.max_residual, v);
  }
  if (!decidable) r.max_residual = std::numeric_limits<double>::infinity();
  r.hamiltonian = r.max_residual <= tolerance;
  return r;
}

DensityCoefficient bracket_affine(const Current& c,
                                  const HamiltonianSection& h) {
  const Chart& chart = h.chart();
  auto d = d_current(c, chart);
  Expression acc = d.c0;
  for (int a = 0; a < chart.n(); ++a) {
    for (int i = 0; i < chart.m(); ++i) {
      acc = acc + d.cu[a][i] * diff(h.H(), chart.p(i, a));
    }
    acc = acc - diff(h.H(), chart.u(a)) * c.Y[a];
  }
  return simplify(acc);
}

DensityCoefficient bracket_affine(const Expression& f,
                                  const HamiltonianSection& h) {
  const Chart& chart = h.chart();
  require_one_dimensional(chart, "bracket_affine");
  chart.check_scope(f, true, "function");
  Expression acc = diff(f, chart.x(0));
  for (int a = 0; a < chart.n(); ++a) {
    acc = acc + diff(f, chart.u(a)) * diff(h.H(), chart.p(0, a)) -
          diff(f, chart.p(0, a)) * diff(h.H(), chart.u(a));
  }
  return simplify(acc);
}

DensityCoefficient bracket_linear(const Current& c, const DensityCoefficient& F,
                                  const Chart& chart) {
  chart.check_scope(F, true, "density");
  auto d = d_current(c, chart);
  Expression acc;
  for (int a = 0; a < chart.n(); ++a) {
    for (int i = 0; i < chart.m(); ++i) {
      acc = acc + d.cu[a][i] * diff(F, chart.p(i, a));
    }
    acc = acc - diff(F, chart.u(a)) * c.Y[a];
  }
  return simplify(acc);
}

DensityCoefficient bracket_linear(const Expression& f, const Expression& g,
                                  const Chart& chart) {
  require_one_dimensional(chart, "bracket_linear");
  chart.check_scope(f, true, "function");
  chart.check_scope(g, true, "function");
  Expression acc;
  for (int a = 0; a < chart.n(); ++a) {
    acc = acc + diff(f, chart.u(a)) * diff(g, chart.p(0, a)) -
          diff(f, chart.p(0, a)) * diff(g, chart.u(a));
  }
  return simplify(acc);
}

Current current_bracket(const Current& a, const Current& b,
                        const Chart& chart) {
  if (chart.m() < 2) {
    throw Error(
        "current_bracket needs m >= 2; on a one-dimensional base use "
        "bracket_linear on plain functions");
  }
  require_valid(a, chart);
  require_valid(b, chart);
  const int m = chart.m();
  const int n = chart.n();
  Current r;
  r.name = "{" + a.name + "," + b.name + "}";
  for (int al = 0; al < n; ++al) {
    Expression acc;
    for (int be = 0; be < n; ++be) {
      acc = acc + a.Y[be] * diff(b.Y[al], chart.u(be)) -
            b.Y[be] * diff(a.Y[al], chart.u(be));
    }
    r.Y.push_back(simplify(-acc));
  }
  for (int i = 0; i < m; ++i) {
    Expression acc;
    for (int be = 0; be < n; ++be) {
      acc = acc + a.Y[be] * diff(b.beta[i], chart.u(be)) -
            b.Y[be] * diff(a.beta[i], chart.u(be));
    }
    r.beta.push_back(simplify(-acc));
  }
  return r;
}

VerticalField hamiltonian_field(const Current& c, const Chart& chart) {
  auto d = d_current(c, chart);
  VerticalField v;
  v.vu = d.cp;
  v.vp.assign(chart.m(), std::vector<Expression>(chart.n()));
  for (int i = 0; i < chart.m(); ++i) {
    for (int b = 0; b < chart.n(); ++b) v.vp[i][b] = simplify(-d.cu[b][i]);
  }
  v.vpext = simplify(-d.c0);
  return v;
}

Expression representation_defect(const Current& a, const Current& b,
                                  const HamiltonianSection& h) {
  const Chart& chart = h.chart();
  Current ab = current_bracket(a, b, chart);
  Expression t1 = bracket_affine(ab, h);
  Expression t2 = bracket_linear(a, bracket_affine(b, h), chart);
  Expression t3 = bracket_linear(b, bracket_affine(a, h), chart);
  return simplify(t1 - t2 + t3);
}

double representation_residual(const Current& a, const Current& b,
                               const HamiltonianSection& h,
                               const std::vector<Binding>& samples) {
  const Chart& chart = h.chart();
  Current ab = current_bracket(a, b, chart);
  // Evaluate the three terms separately so that cancellation is numerical,
  // not a consequence of simplification.
  CompiledExpression t1(bracket_affine(ab, h), chart.all_names());
  CompiledExpression t2(bracket_linear(a, bracket_affine(b, h), chart),
                        chart.all_names());
  CompiledExpression t3(bracket_linear(b, bracket_affine(a, h), chart),
                        chart.all_names());
  auto names = chart.all_names();
  std::vector<double> values(names.size());
  double worst = 0.0;
  for (const auto& s : samples) {
    for (std::size_t k = 0; k < names.size(); ++k) values[k] = s.get(names[k]);
    worst = std::max(worst, std::fabs(t1(values) - t2(values) + t3(values)));
  }
  return worst;
}

double representation_residual(const Expression& f, const Expression& g,
                               const HamiltonianSection& h,
                               const std::vector<Binding>& samples) {
  const Chart& chart = h.chart();
  require_one_dimensional(chart, "representation_residual");
  auto names = chart.all_names();
  CompiledExpression t1(bracket_affine(bracket_linear(f, g, chart), h), names);
  CompiledExpression t2(bracket_linear(f, bracket_affine(g, h), chart), names);
  CompiledExpression t3(bracket_linear(g, bracket_affine(f, h), chart), names);
  double worst = 0.0;
  std::vector<double> values(names.size());
  for (const auto& s : samples) {
    for (std::size_t k = 0; k < names.size(); ++k) values[k] = s.get(names[k]);
    worst = std::max(worst, std::fabs(t1(values) - t2(values) + t3(values)));
  }
  return worst;
}

}  // namespace hdw
