#pragma once

// Numerical integration of the Hamilton-deDonder-Weyl equations: the m=1
// case as an ODE, and 1+1-D fields by the method of lines with x1 as time.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hdw/bundle.hpp"
#include "hdw/compiled.hpp"
#include "hdw/models.hpp"

namespace hdw {

class NumericError : public Error {
 public:
  using Error::Error;
};

enum class Boundary { Periodic, Dirichlet };
enum class Reconstruction { ClosedForm, Newton };

std::string to_string(Boundary b);
std::string to_string(Reconstruction r);
Boundary parse_boundary(const std::string& s);
Reconstruction parse_reconstruction(const std::string& s);

struct SolverConfig {
  double dt = 0.0;
  int K = 128;
  double x_min = 0.0;
  double x_max = 6.283185307179586;
  double t0 = 0.0;
  double t_final = 1.0;
  Boundary boundary = Boundary::Periodic;
  std::string scheme = "rk4";
  Reconstruction reconstruction = Reconstruction::Newton;
  int snapshot_every = 1;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;

  void validate() const;
  double dx() const;
  double grid_point(int k) const;
  // Step count and step size: dt is shrunk so that t_final - t0 is an exact
  // multiple of it.
  int steps() const;
  double step_size() const;
};

// ---------------------------------------------------------------------------
// m = 1

struct OdeState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> p;
};

class OdeSystem {
 public:
  explicit OdeSystem(const HamiltonianSection& h);
  // (du/dt, dp/dt) = (dH/dp, -dH/du).
  void rhs(double t, std::span<const double> u, std::span<const double> p,
           std::span<double> du, std::span<double> dp) const;
  double energy(const OdeState& s) const;
  const Chart& chart() const { return chart_; }

 private:
  Chart chart_;
  std::vector<CompiledExpression> dHdu_, dHdp_;
  CompiledExpression H_;
};

OdeState step_ode_rk4(const OdeState& s, const OdeSystem& sys, double dt);
OdeState step_ode_rk4(const OdeState& s, const HamiltonianSection& h,
                      double dt);
// Snapshots at every step, including the initial state.
std::vector<OdeState> integrate_ode(const OdeState& s0,
                                    const HamiltonianSection& h, double dt,
                                    double t_final);

// ---------------------------------------------------------------------------
// m = 2 fields on a grid in x2; M = p1_*, P = p2_*.

struct GridSection {
  double t = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> u, M, P;  // [alpha][k]
};

// Solves dH/dP = ux for P at one point given (t, x, u, M).
using ClosedFormP = std::function<void(
    double t, double x, std::span<const double> u, std::span<const double> M,
    std::span<const double> ux, std::span<double> P)>;

struct FieldModel {
  std::string name;
  HamiltonianSection h;
  ClosedFormP closed_form;  // may be empty
};

FieldModel field_model(const std::string& name, const HamiltonianSection& h);
FieldModel wave_field_model(const ContinuumSpec& spec = {});
FieldModel perfect_gas_field_model(const PerfectGas& gas);

// First derivative in x2: central in the interior, periodic wrap or
// second-order one-sided at Dirichlet ends.
std::vector<double> grid_derivative(const std::vector<double>& f, double dx,
                                    Boundary b);

class FieldSystem {
 public:
  FieldSystem(FieldModel model, SolverConfig config);

  const SolverConfig& config() const { return config_; }
  const FieldModel& model() const { return model_; }
  int n() const { return n_; }

  // Grid section with P reconstructed from u; u0 and M0 are functions of x.
  GridSection initial_section(
      const std::vector<std::function<double(double)>>& u0,
      const std::vector<std::function<double(double)>>& M0) const;

  // P from dH/dP = D_x u at every grid point; `warm` is the Newton start.
  std::vector<std::vector<double>> reconstruct_P(
      double t, const std::vector<std::vector<double>>& u,
      const std::vector<std::vector<double>>& M,
      const std::vector<std::vector<double>>* warm) const;

  // Time derivatives (du/dt, dM/dt) given (u, M, P).
  void rhs(double t, const std::vector<std::vector<double>>& u,
           const std::vector<std::vector<double>>& M,
           const std::vector<std::vector<double>>& P,
           std::vector<std::vector<double>>& du,
           std::vector<std::vector<double>>& dM) const;

  GridSection step(const GridSection& s, double dt) const;

  // Values of dH/dM, dH/dP, dH/du at one grid point.
  void gradients(double t, double x, std::span<const double> u,
                 std::span<const double> M, std::span<const double> P,
                 std::span<double> dM, std::span<double> dP,
                 std::span<double> du) const;

 private:
  FieldModel model_;
  SolverConfig config_;
  int n_;
  std::vector<std::string> slots_;
  std::vector<CompiledExpression> dHdM_, dHdP_, dHdu_;
  std::vector<std::vector<CompiledExpression>> d2HdP2_;

  void fill(std::vector<double>& values, double t, double x,
            std::span<const double> u, std::span<const double> M,
            std::span<const double> P) const;
};

struct FieldRun {
  std::vector<GridSection> trajectory;
  std::vector<std::string> warnings;
  double dt = 0.0;
  int steps = 0;
};

FieldRun evolve_field(const FieldModel& model, const SolverConfig& config,
                      const GridSection& initial);

std::vector<std::vector<double>> reconstruct_P(
    const FieldModel& model, const SolverConfig& config, double t,
    const std::vector<std::vector<double>>& u,
    const std::vector<std::vector<double>>& M);

// ---------------------------------------------------------------------------
// Residuals

struct Norms {
  std::string name;
  double max = 0.0;
  double l2 = 0.0;  // sqrt(sum r^2 * cell volume)
  int count = 0;

  void add(double r, double weight);
  void finish();
};

// Per equation: du/dt - dH/dM, du/dx - dH/dP, dM/dt + dP/dx + dH/du.
// Needs at least three equally spaced snapshots.
std::vector<Norms> hdw_residual(const std::vector<GridSection>& traj,
                                const HamiltonianSection& h, Boundary b);
// m = 1: du/dt - dH/dp, dp/dt + dH/du.
std::vector<Norms> hdw_residual(const std::vector<OdeState>& traj,
                                const HamiltonianSection& h);

// ---------------------------------------------------------------------------
// Yang-Mills in 1+1 dimensions, temporal gauge u_0 = 0: A^a = u^a_1 and
// E_a = pi^{01}_a on a grid in x.

struct YangMillsSection {
  double t = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> A, E;  // [alpha][k]
};

struct YangMillsRun {
  std::vector<YangMillsSection> trajectory;
  double dt = 0.0;
  int steps = 0;
};

YangMillsRun evolve_yang_mills(const YangMillsModel& ym,
                               const SolverConfig& config,
                               const YangMillsSection& initial);

// Gauss law -dE_a/dx - c^g_{ab} A^b E_g on one section.
Norms gauss_residual(const YangMillsSection& s, const YangMillsModel& ym,
                     Boundary b);

// Field equation g^{00} g^{11} F_01 + pi^{01}/2, Gauss law, and evolution
// dE/dt + c u_0 E, over the interior snapshots.
std::vector<Norms> ym_residual(const std::vector<YangMillsSection>& traj,
                               const YangMillsModel& ym, Boundary b);

}  // namespace hdw
