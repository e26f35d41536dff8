#include "hdw/bundle.hpp"

#include <algorithm>

namespace hdw {

Chart::Chart(int m, int n) : m_(m), n_(n) {
  if (m < 1 || n < 1) {
    throw Error("chart dimensions must be positive (m=" + std::to_string(m) +
                ", n=" + std::to_string(n) + ")");
  }
  for (int i = 0; i < m; ++i) x_.push_back("x" + std::to_string(i + 1));
  for (int a = 0; a < n; ++a) u_.push_back("u" + std::to_string(a + 1));
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < n; ++a) p_.push_back(p(i, a));
  }
}

std::string Chart::x(int i) const { return "x" + std::to_string(i + 1); }
std::string Chart::u(int alpha) const {
  return "u" + std::to_string(alpha + 1);
}
std::string Chart::p(int i, int alpha) const {
  return "p" + std::to_string(i + 1) + "_" + std::to_string(alpha + 1);
}

std::vector<std::string> Chart::all_names() const {
  std::vector<std::string> out = x_;
  out.insert(out.end(), u_.begin(), u_.end());
  out.insert(out.end(), p_.begin(), p_.end());
  return out;
}

bool Chart::is_base(const std::string& name) const {
  return std::find(x_.begin(), x_.end(), name) != x_.end();
}
bool Chart::is_fiber(const std::string& name) const {
  return std::find(u_.begin(), u_.end(), name) != u_.end();
}
bool Chart::is_momentum(const std::string& name) const {
  return std::find(p_.begin(), p_.end(), name) != p_.end();
}
bool Chart::contains(const std::string& name) const {
  return is_base(name) || is_fiber(name) || is_momentum(name);
}

void Chart::check_scope(const Expression& e, bool allow_momenta,
                        const std::string& what) const {
  for (const auto& v : e.variables()) {
    if (!contains(v)) {
      throw Error(what + ": variable '" + v + "' is not a coordinate of the " +
                  std::to_string(m_) + "x" + std::to_string(n_) + " chart");
    }
    if (!allow_momenta && is_momentum(v)) {
      throw Error(what + ": may not depend on momentum '" + v + "'");
    }
  }
}

HamiltonianSection::HamiltonianSection(Chart chart, Expression H)
    : chart_(std::move(chart)), H_(std::move(H)) {
  chart_.check_scope(H_, true, "Hamiltonian");
}

Current Current::zero(const Chart& chart) {
  Current c;
  c.Y.assign(chart.n(), Expression());
  c.beta.assign(chart.m(), Expression());
  return c;
}

Current operator+(const Current& a, const Current& b) {
  if (a.Y.size() != b.Y.size() || a.beta.size() != b.beta.size()) {
    throw Error("cannot add currents of different shapes");
  }
  Current c;
  c.name = a.name + "+" + b.name;
  for (std::size_t k = 0; k < a.Y.size(); ++k) {
    c.Y.push_back(simplify(a.Y[k] + b.Y[k]));
  }
  for (std::size_t k = 0; k < a.beta.size(); ++k) {
    c.beta.push_back(simplify(a.beta[k] + b.beta[k]));
  }
  return c;
}

Current operator*(double s, const Current& a) {
  Current c;
  c.name = a.name;
  for (const auto& y : a.Y) c.Y.push_back(simplify(Expression(s) * y));
  for (const auto& b : a.beta) c.beta.push_back(simplify(Expression(s) * b));
  return c;
}

CurrentValidation validate_current(const Current& c, const Chart& chart) {
  CurrentValidation r;
  if (c.Y.size() != static_cast<std::size_t>(chart.n()) ||
      c.beta.size() != static_cast<std::size_t>(chart.m())) {
    r.valid = false;
    r.message = "current '" + c.name + "' needs " + std::to_string(chart.n()) +
                " Y and " + std::to_string(chart.m()) +
                " beta coefficients, got " + std::to_string(c.Y.size()) +
                " and " + std::to_string(c.beta.size());
    return r;
  }
  std::set<std::string> bad;
  auto scan = [&](const Expression& e) {
    for (const auto& v : e.variables()) {
      if (!(chart.is_base(v) || chart.is_fiber(v))) bad.insert(v);
    }
  };
  for (const auto& y : c.Y) scan(y);
  for (const auto& b : c.beta) scan(b);
  if (!bad.empty()) {
    r.valid = false;
    r.offending.assign(bad.begin(), bad.end());
    r.message = "current '" + c.name + "' depends on";
    for (const auto& v : r.offending) r.message += " " + v;
    r.message += "; Y and beta may only use base and fiber coordinates";
  }
  return r;
}

void require_valid(const Current& c, const Chart& chart) {
  auto r = validate_current(c, chart);
  if (!r.valid) throw Error(r.message);
}

std::vector<Expression> current_coefficients(const Current& c,
                                             const Chart& chart) {
  require_valid(c, chart);
  std::vector<Expression> out;
  for (int i = 0; i < chart.m(); ++i) {
    Expression acc = c.beta[i];
    for (int a = 0; a < chart.n(); ++a) {
      acc = acc + c.Y[a] * Expression::variable(chart.p(i, a));
    }
    out.push_back(simplify(acc));
  }
  return out;
}

Current current_from_coefficients(const std::vector<Expression>& alpha0,
                                  const Chart& chart) {
  if (chart.m() < 2) {
    throw Error("a current of a one-dimensional base is a plain function");
  }
  if (alpha0.size() != static_cast<std::size_t>(chart.m())) {
    throw Error("expected " + std::to_string(chart.m()) + " coefficients");
  }
  Current c;
  for (int a = 0; a < chart.n(); ++a) c.Y.push_back(diff(alpha0[0], chart.p(0, a)));
  for (int i = 0; i < chart.m(); ++i) {
    // beta^i = alpha^{0i} - Y^alpha p^i_alpha
    Expression acc = alpha0[i];
    for (int a = 0; a < chart.n(); ++a) {
      acc = acc - c.Y[a] * Expression::variable(chart.p(i, a));
    }
    c.beta.push_back(simplify(acc));
  }
  auto r = validate_current(c, chart);
  if (!r.valid) {
    throw Error("coefficients are not of current form: " + r.message);
  }
  return c;
}

CurrentDifferential d_current(const Current& c, const Chart& chart) {
  require_valid(c, chart);
  const int m = chart.m();
  const int n = chart.n();
  CurrentDifferential d;
  Expression c0;
  for (int i = 0; i < m; ++i) {
    c0 = c0 + diff(c.beta[i], chart.x(i));
    for (int a = 0; a < n; ++a) {
      c0 = c0 + diff(c.Y[a], chart.x(i)) * Expression::variable(chart.p(i, a));
    }
  }
  d.c0 = simplify(c0);
  d.cu.assign(n, std::vector<Expression>(m));
  for (int b = 0; b < n; ++b) {
    for (int i = 0; i < m; ++i) {
      Expression acc = diff(c.beta[i], chart.u(b));
      for (int a = 0; a < n; ++a) {
        acc = acc + diff(c.Y[a], chart.u(b)) * Expression::variable(chart.p(i, a));
      }
      d.cu[b][i] = simplify(acc);
    }
  }
  for (int a = 0; a < n; ++a) d.cp.push_back(simplify(c.Y[a]));
  return d;
}

Expression extended_density(const HamiltonianSection& h) {
  return simplify(Expression::variable(kExtendedMomentum) + h.H());
}

}  // namespace hdw
