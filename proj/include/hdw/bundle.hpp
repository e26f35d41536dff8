#pragma once

// Local coordinates (x^i, u^alpha, p^i_alpha) of the restricted multimomentum
// bundle, Hamiltonian sections and currents.
//
// Indices are 0-based in the API; variable names are 1-based:
// x1..xm, u1..un, and "pI_A" for p^i_alpha with I = i+1, A = alpha+1.

#include <string>
#include <vector>

#include "hdw/expr.hpp"

namespace hdw {

inline constexpr const char* kExtendedMomentum = "pext";

class Chart {
 public:
  Chart(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }

  std::string x(int i) const;
  std::string u(int alpha) const;
  std::string p(int i, int alpha) const;

  const std::vector<std::string>& base_names() const { return x_; }
  const std::vector<std::string>& fiber_names() const { return u_; }
  // Ordered i-major: p(0,0), p(0,1), ..., p(m-1,n-1).
  const std::vector<std::string>& momentum_names() const { return p_; }
  // x, then u, then p.
  std::vector<std::string> all_names() const;

  bool is_base(const std::string& name) const;
  bool is_fiber(const std::string& name) const;
  bool is_momentum(const std::string& name) const;
  bool contains(const std::string& name) const;

  // Throws Error naming the first variable of e outside the chart (or a
  // momentum variable when allow_momenta is false).
  void check_scope(const Expression& e, bool allow_momenta,
                   const std::string& what) const;

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.m_ == b.m_ && a.n_ == b.n_;
  }

 private:
  int m_;
  int n_;
  std::vector<std::string> x_, u_, p_;
};

class HamiltonianSection {
 public:
  HamiltonianSection(Chart chart, Expression H);

  const Chart& chart() const { return chart_; }
  const Expression& H() const { return H_; }

 private:
  Chart chart_;
  Expression H_;
};

// Coefficient of d^m x of a density on the restricted multimomentum bundle.
using DensityCoefficient = Expression;

// A current for m >= 2: vertical field Y (n coefficients) and semibasic form
// coefficients beta (m coefficients), all functions of (x, u).
struct Current {
  std::string name;
  std::vector<Expression> Y;
  std::vector<Expression> beta;

  static Current zero(const Chart& chart);
};

Current operator+(const Current& a, const Current& b);
Current operator*(double s, const Current& a);

struct CurrentValidation {
  bool valid = true;
  std::vector<std::string> offending;  // variables that may not appear
  std::string message;
};

CurrentValidation validate_current(const Current& c, const Chart& chart);
void require_valid(const Current& c, const Chart& chart);

// alpha^{0i} = Y^alpha p^i_alpha + beta^i.
std::vector<Expression> current_coefficients(const Current& c,
                                             const Chart& chart);

// Inverse of current_coefficients for m >= 2.
Current current_from_coefficients(const std::vector<Expression>& alpha0,
                                  const Chart& chart);

struct CurrentDifferential {
  Expression c0;                             // d^m x
  std::vector<std::vector<Expression>> cu;   // [beta][i]: du^beta ^ d^{m-1}x_i
  std::vector<Expression> cp;                // [alpha]: sum_i dp^i_alpha ^ d^{m-1}x_i
};

CurrentDifferential d_current(const Current& c, const Chart& chart);

// pext + H.
Expression extended_density(const HamiltonianSection& h);

}  // namespace hdw
