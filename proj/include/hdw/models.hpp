#pragma once

// Built-in theories: time-dependent mechanics, simplified elasticity and the
// wave equation, the one-dimensional perfect gas, and Yang-Mills.

#include <optional>
#include <string>
#include <vector>

#include "hdw/bundle.hpp"

namespace hdw {

using Matrix = std::vector<std::vector<double>>;

Matrix identity_matrix(int n);
Matrix inverse(const Matrix& a);
double determinant(const Matrix& a);

// H = sum_a p1_a^2/2 + V(x1, u) on an m=1 chart with n fiber coordinates.
HamiltonianSection model_td_mechanics(int n, const Expression& V);

struct GasConstants {
  double gamma = 1.4;  // adiabatic index
  double eps0 = 1.0;
  double rho0 = 1.0;
  double s0 = 0.0;
  double cv = 1.0;
};

struct ContinuumSpec {
  int N = 1;                 // spatial dimension; the chart has m = N+1, n = N
  Matrix g = {{1.0}};        // fiber metric g_{alpha beta}
  Matrix G = {{1.0}};        // base metric G_{ij}
  Expression rho = 1.0;      // reference mass density, may depend on x2..xm
  Expression entropy = 0.0;  // reference entropy density
  std::optional<GasConstants> gas;

  void validate() const;
};

// Momenta of a continuum chart: M_alpha = p1_alpha, P^i_alpha = p{i+1}_alpha.
// H = 1/2 g^{ab} M_a M_b / rho - 1/2 P^i_a G_{ij} P^j_b g^{ab} / rho.
HamiltonianSection model_elasticity_simple(const ContinuumSpec& spec);
// N = 1 case of the above.
HamiltonianSection model_wave(const ContinuumSpec& spec = {});

struct LegendreMomenta {
  std::vector<double> M;  // [alpha]
  Matrix P;               // [i][alpha]
};

// M_a = g_{ab} V^b rho; P^i_a = -G^{ij} F^b_j g_{ab} rho, with F[alpha][i].
LegendreMomenta legendre_momenta(const std::vector<double>& V, const Matrix& F,
                                 const ContinuumSpec& spec, double rho);

// sigma^{ab} = -F^a_i P^i_c g^{bc} / det F, with F[alpha][i], P[i][alpha].
Matrix piola_transform(const Matrix& F, const Matrix& P, const Matrix& g);
// P^i_c = -det F (F^{-1})^i_a sigma^{ab} g_{bc}.
Matrix inverse_piola_transform(const Matrix& F, const Matrix& sigma,
                               const Matrix& g);

// One-dimensional perfect gas. Energy density
//   eps(F) = eps0 exp((s/rho - s0/rho0)/cv) (rho/(F rho0 sqrt g))^gamma sqrt g
// with pressure p sqrt g = (gamma-1) eps, and momentum P = f(F)/F where
// f(x) = x * p sqrt g evaluated at spatial density rho/x.
class PerfectGas {
 public:
  explicit PerfectGas(const ContinuumSpec& spec);

  const GasConstants& constants() const { return gas_; }

  double internal_energy(double F) const;
  double pressure_density(double F) const;  // p sqrt(det g)
  double state_function(double x) const;   // f(x)
  double momentum(double F) const;          // P(F) = f(F)/F
  // Inverse of momentum(); throws DomainError when the relation is not
  // invertible (gamma = 1, or P outside the range of the map).
  double deformation(double P) const;

  // eps(F) as an expression in the variable named `F`.
  Expression internal_energy_expr(const std::string& F) const;

  // Kinetic plus internal energy as a function of (M, F); valid for any
  // gamma, including the degenerate gamma = 1.
  double energy(double M, double F) const;

  // H(x, u, M, P); requires gamma != 1.
  HamiltonianSection hamiltonian() const;

 private:
  ContinuumSpec spec_;
  GasConstants gas_;
  double rho_;
  double sqrt_g_;
  double C_;  // P = C F^-gamma
};

class LieAlgebraSpec {
 public:
  // c[gamma][alpha][beta]; validated for antisymmetry and Jacobi to 1e-12.
  LieAlgebraSpec(std::string name, std::vector<Matrix> c);

  static LieAlgebraSpec abelian(int n);
  static LieAlgebraSpec su2();

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(c_.size()); }
  double c(int g, int a, int b) const { return c_[g][a][b]; }

  double antisymmetry_defect() const;
  double jacobi_defect() const;

 private:
  std::string name_;
  std::vector<Matrix> c_;
};

// Yang-Mills chart: base dimension m, fiber coordinates u^alpha_i stored as
// u{alpha*m + i + 1}; the momentum conjugate to u^alpha_j in direction i is
// p^{ij}_alpha. The Hamiltonian depends on the momenta only through
// pi^{ij}_alpha = p^{ij}_alpha - p^{ji}_alpha.
struct YangMillsModel {
  LieAlgebraSpec algebra;
  int m;
  std::vector<double> metric;  // diagonal base metric g_ii
  Chart chart;
  HamiltonianSection h;

  int fiber_index(int alpha, int i) const { return alpha * m + i; }
  std::string u(int alpha, int i) const { return chart.u(fiber_index(alpha, i)); }
  std::string p(int i, int j, int alpha) const {
    return chart.p(i, fiber_index(alpha, j));
  }
  // pi^{ij}_alpha as an expression of the chart momenta.
  Expression pi(int i, int j, int alpha) const;
};

// H1 = 1/16 pi^a_{ij} pi^{ij}_a + 1/4 c^g_{ab} u^a_i u^b_j pi^{ij}_g,
// with indices lowered by the diagonal metric and the identity pairing.
YangMillsModel model_yang_mills(const LieAlgebraSpec& la, int m,
                                std::vector<double> metric = {});

// H1 as a function of independent pi^{ij}_alpha (i < j) and u^alpha_i, in
// variables "pi{I}{J}_{A}" and the chart names u.
Expression yang_mills_reduced_hamiltonian(const YangMillsModel& ym);

// F[gamma][k][l] = du[gamma][l][k] - du[gamma][k][l] + c^g_{ab} u[a][k] u[b][l],
// where du[gamma][k][l] = d u^gamma_k / d x^l.
std::vector<Matrix> curvature(const Matrix& u,
                              const std::vector<Matrix>& du,
                              const LieAlgebraSpec& la);

}  // namespace hdw
