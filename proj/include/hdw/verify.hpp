#pragma once

// Executable certification checks. Each check returns a report whose status
// is pass iff every measured quantity is within its declared tolerance.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hdw/bracket.hpp"
#include "hdw/solver.hpp"

namespace hdw {

struct Measurement {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  // "max": value <= tolerance; "min": value >= tolerance;
  // "band": |value - target| <= tolerance * target; "flag": value != 0.
  std::string kind = "max";
  double target = 0.0;
  bool passed = false;
};

struct RefinementLevel {
  std::string label;
  double h = 0.0;
  double residual = 0.0;
  double extra = 0.0;  // check-specific (e.g. solution error)
};

struct VerificationReport {
  std::string check;
  std::string statement;  // the property being certified, in words
  bool passed = false;
  double max_residual = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<Measurement> measurements;
  std::vector<RefinementLevel> levels;
  std::vector<double> ratios;
  std::vector<std::string> notes;

  void measure_max(const std::string& name, double value, double tol);
  void measure_min(const std::string& name, double value, double bound);
  void measure_band(const std::string& name, double value, double target,
                    double rel_tol);
  void measure_flag(const std::string& name, bool ok);
  void finish();
};

std::string to_json(const VerificationReport& r, int indent = 2);
std::string to_json(const std::vector<VerificationReport>& rs, int indent = 2);

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  int levels = 3;  // refinement ladder length for convergence checks
};

// ---------------------------------------------------------------------------
// Sparse polynomials with exact monomial arithmetic; used to generate random
// data and as an independent oracle for bracket formulas.

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial constant(std::vector<std::string> vars, double c);
  static Polynomial variable(std::vector<std::string> vars, const std::string& v);
  // Dense polynomial of total degree <= degree in the listed variables, with
  // coefficients uniform in [-1, 1].
  static Polynomial random(std::vector<std::string> vars,
                           const std::vector<std::string>& active, int degree,
                           std::mt19937_64& rng);

  const std::vector<std::string>& vars() const { return vars_; }
  Polynomial derivative(const std::string& v) const;
  double eval(const Binding& b) const;
  Expression to_expression() const;
  std::size_t terms() const { return coef_.size(); }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

 private:
  std::vector<std::string> vars_;
  std::map<std::vector<int>, double> coef_;

  std::size_t index_of(const std::string& v) const;
};

// A current whose coefficients are polynomials.
struct PolyCurrent {
  std::vector<Polynomial> Y, beta;
  Current to_current(const std::string& name) const;
};

PolyCurrent random_poly_current(const Chart& chart, int degree,
                                std::mt19937_64& rng);
std::vector<Binding> random_bindings(const std::vector<std::string>& names,
                                     int count, double lo, double hi,
                                     std::mt19937_64& rng);

// Bracket of polynomial currents by polynomial arithmetic:
// -([Y,Z], i_Y d beta - i_Z d alpha).
PolyCurrent poly_current_bracket(const PolyCurrent& a, const PolyCurrent& b,
                                 const Chart& chart);

// ---------------------------------------------------------------------------
// Checks

VerificationReport check_representation(const VerifyOptions& o);
VerificationReport check_jacobi_currents(const VerifyOptions& o);
VerificationReport check_m1_reduction(const VerifyOptions& o);
VerificationReport check_sharp_roundtrip(const VerifyOptions& o);
VerificationReport check_ode_bracket_evolution(const VerifyOptions& o);
VerificationReport check_field_bracket_evolution(const VerifyOptions& o);
VerificationReport check_field_converse(const VerifyOptions& o);
VerificationReport check_connection_class(const VerifyOptions& o);
VerificationReport check_ym_conservation(const VerifyOptions& o);
VerificationReport check_derivatives(const VerifyOptions& o);
VerificationReport check_perfect_gas(const VerifyOptions& o);

const std::vector<std::string>& suite_names();
// Runs one named suite; throws Error for an unknown name.
VerificationReport run_suite(const std::string& name, const VerifyOptions& o);

// Pulled-back differential of a current along a grid trajectory minus its
// bracket with h, at every interior point; max |.| over the trajectory.
double field_bracket_evolution_residual(const std::vector<GridSection>& traj,
                                        const Current& c,
                                        const HamiltonianSection& h,
                                        Boundary b);
// m = 1: d/dt (f o s) by fourth-order central differences minus {f, h} o s.
double ode_bracket_evolution_residual(const std::vector<OdeState>& traj,
                                      const Expression& f,
                                      const HamiltonianSection& h);

}  // namespace hdw
