#include "hdw/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace hdw {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& a) {
  const auto r = static_cast<Eigen::Index>(a.size());
  const auto c = r ? static_cast<Eigen::Index>(a[0].size()) : 0;
  Eigen::MatrixXd out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(a[i].size()) != c) {
      throw Error("ragged matrix");
    }
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = a[i][j];
  }
  return out;
}

Matrix from_eigen(const Eigen::MatrixXd& a) {
  Matrix out(a.rows(), std::vector<double>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out[i][j] = a(i, j);
  }
  return out;
}

void require_square(const Matrix& a, std::size_t n, const char* what) {
  if (a.size() != n) {
    throw Error(std::string(what) + " must be " + std::to_string(n) + "x" +
                std::to_string(n));
  }
  for (const auto& row : a) {
    if (row.size() != n) {
      throw Error(std::string(what) + " must be " + std::to_string(n) + "x" +
                  std::to_string(n));
    }
  }
}

void require_spd(const Matrix& a, const char* what) {
  auto e = to_eigen(a);
  if ((e - e.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1 + e.cwiseAbs().maxCoeff())) {
    throw Error(std::string(what) + " must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(e);
  if (llt.info() != Eigen::Success) {
    throw Error(std::string(what) + " must be positive definite");
  }
}

Expression var(const std::string& name) { return Expression::variable(name); }

}  // namespace

Matrix identity_matrix(int n) {
  Matrix out(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) out[i][i] = 1.0;
  return out;
}

Matrix inverse(const Matrix& a) {
  require_square(a, a.size(), "matrix");
  auto e = to_eigen(a);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
  if (!lu.isInvertible()) throw DomainError("singular matrix");
  return from_eigen(lu.inverse());
}

double determinant(const Matrix& a) {
  require_square(a, a.size(), "matrix");
  return to_eigen(a).determinant();
}

HamiltonianSection model_td_mechanics(int n, const Expression& V) {
  Chart chart(1, n);
  Expression H;
  for (int a = 0; a < n; ++a) {
    H = H + pow(var(chart.p(0, a)), 2) / Expression(2.0);
  }
  H = simplify(H + V);
  for (const auto& v : V.variables()) {
    if (!(chart.is_base(v) || chart.is_fiber(v))) {
      throw Error("potential may depend on x1 and u only, found '" + v + "'");
    }
  }
  return HamiltonianSection(chart, H);
}

void ContinuumSpec::validate() const {
  if (N < 1) throw Error("spatial dimension must be positive");
  require_square(g, N, "fiber metric g");
  require_square(G, N, "base metric G");
  require_spd(g, "fiber metric g");
  require_spd(G, "base metric G");
  Chart chart(N + 1, N);
  for (const auto& v : rho.variables()) {
    if (!chart.is_base(v) || v == chart.x(0)) {
      throw Error("reference density may depend on spatial coordinates only");
    }
  }
  if (rho.is_constant() && !(rho.value() > 0)) {
    throw Error("reference density must be positive");
  }
  if (gas) {
    if (!(gas->gamma >= 1.0)) throw Error("adiabatic index must be >= 1");
    if (!(gas->eps0 > 0 && gas->rho0 > 0 && gas->cv > 0)) {
      throw Error("gas constants eps0, rho0, cv must be positive");
    }
  }
}

HamiltonianSection model_elasticity_simple(const ContinuumSpec& spec) {
  spec.validate();
  const int N = spec.N;
  Chart chart(N + 1, N);
  Matrix ginv = inverse(spec.g);
  Expression kinetic;
  Expression stored;
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      if (ginv[a][b] == 0.0) continue;
      kinetic = kinetic + Expression(ginv[a][b]) * var(chart.p(0, a)) *
                              var(chart.p(0, b));
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          if (spec.G[i][j] == 0.0) continue;
          stored = stored + Expression(spec.G[i][j] * ginv[a][b]) *
                                var(chart.p(i + 1, a)) * var(chart.p(j + 1, b));
        }
      }
    }
  }
  Expression H = (kinetic - stored) / (Expression(2.0) * spec.rho);
  return HamiltonianSection(chart, simplify(H));
}

HamiltonianSection model_wave(const ContinuumSpec& spec) {
  if (spec.N != 1) throw Error("the wave model is one-dimensional (N=1)");
  return model_elasticity_simple(spec);
}

LegendreMomenta legendre_momenta(const std::vector<double>& V, const Matrix& F,
                                 const ContinuumSpec& spec, double rho) {
  const int N = spec.N;
  if (V.size() != static_cast<std::size_t>(N)) {
    throw Error("velocity must have N components");
  }
  require_square(F, N, "deformation gradient");
  Matrix Ginv = inverse(spec.G);
  LegendreMomenta out;
  out.M.assign(N, 0.0);
  out.P.assign(N, std::vector<double>(N, 0.0));
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) out.M[a] += spec.g[a][b] * V[b] * rho;
  }
  for (int i = 0; i < N; ++i) {
    for (int a = 0; a < N; ++a) {
      double acc = 0.0;
      for (int j = 0; j < N; ++j) {
        for (int b = 0; b < N; ++b) acc += Ginv[i][j] * F[b][j] * spec.g[a][b];
      }
      out.P[i][a] = -acc * rho;
    }
  }
  return out;
}

Matrix piola_transform(const Matrix& F, const Matrix& P, const Matrix& g) {
  const std::size_t N = F.size();
  require_square(F, N, "deformation gradient");
  require_square(P, N, "first Piola stress");
  require_square(g, N, "fiber metric");
  auto f = to_eigen(F);
  double det = f.determinant();
  if (std::fabs(det) < 1e-300 || !Eigen::FullPivLU<Eigen::MatrixXd>(f).isInvertible()) {
    throw DomainError("deformation gradient is singular");
  }
  Eigen::MatrixXd sigma = -(f * to_eigen(P) * to_eigen(g).inverse()) / det;
  return from_eigen(sigma);
}

Matrix inverse_piola_transform(const Matrix& F, const Matrix& sigma,
                               const Matrix& g) {
  const std::size_t N = F.size();
  require_square(F, N, "deformation gradient");
  require_square(sigma, N, "Cauchy stress");
  require_square(g, N, "fiber metric");
  auto f = to_eigen(F);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
  if (!lu.isInvertible()) throw DomainError("deformation gradient is singular");
  Eigen::MatrixXd P = -f.determinant() * lu.inverse() * to_eigen(sigma) * to_eigen(g);
  return from_eigen(P);
}

// ---------------------------------------------------------------------------

PerfectGas::PerfectGas(const ContinuumSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.N != 1) throw Error("the perfect gas model is one-dimensional");
  if (!spec_.gas) throw Error("perfect gas needs gas constants");
  if (!spec_.rho.is_constant() || !spec_.entropy.is_constant()) {
    throw Error("perfect gas needs constant reference and entropy densities");
  }
  gas_ = *spec_.gas;
  rho_ = spec_.rho.value();
  sqrt_g_ = std::sqrt(spec_.g[0][0]);
  double K = gas_.eps0 *
             std::exp((spec_.entropy.value() / rho_ - gas_.s0 / gas_.rho0) / gas_.cv);
  C_ = (gas_.gamma - 1.0) * K * sqrt_g_ *
       std::pow(rho_ / (gas_.rho0 * sqrt_g_), gas_.gamma);
}

double PerfectGas::internal_energy(double F) const {
  if (!(F > 0)) throw DomainError("deformation must be positive");
  double K = gas_.eps0 *
             std::exp((spec_.entropy.value() / rho_ - gas_.s0 / gas_.rho0) / gas_.cv);
  double density = rho_ / F;
  return K * std::pow(density / (gas_.rho0 * sqrt_g_), gas_.gamma) * sqrt_g_;
}

double PerfectGas::pressure_density(double F) const {
  return (gas_.gamma - 1.0) * internal_energy(F);
}

double PerfectGas::state_function(double x) const {
  return x * pressure_density(x);
}

double PerfectGas::momentum(double F) const { return state_function(F) / F; }

double PerfectGas::deformation(double P) const {
  if (gas_.gamma == 1.0) {
    throw DomainError(
        "state relation is not invertible for gamma = 1: P(F) = 0 on the whole "
        "interval F in (0, inf)");
  }
  if (!(P > 0)) {
    std::ostringstream os;
    os << "state relation has no preimage for P = " << P
       << "; its range is the interval (0, inf)";
    throw DomainError(os.str());
  }
  return std::pow(C_ / P, 1.0 / gas_.gamma);
}

Expression PerfectGas::internal_energy_expr(const std::string& F) const {
  double K = gas_.eps0 *
             std::exp((spec_.entropy.value() / rho_ - gas_.s0 / gas_.rho0) / gas_.cv);
  // (rho/(F rho0 sqrt g))^gamma = exp(gamma * ln(rho/(F rho0 sqrt g)))
  Expression ratio = Expression(rho_ / (gas_.rho0 * sqrt_g_)) / var(F);
  return Expression(K * sqrt_g_) * exp(Expression(gas_.gamma) * ln(ratio));
}

double PerfectGas::energy(double M, double F) const {
  return M * M / (2.0 * spec_.g[0][0] * rho_) + internal_energy(F);
}

HamiltonianSection PerfectGas::hamiltonian() const {
  if (gas_.gamma == 1.0) {
    throw DomainError(
        "perfect gas Hamiltonian is undefined for gamma = 1 (pressure vanishes "
        "identically); use PerfectGas::energy");
  }
  Chart chart(2, 1);
  const double gm = gas_.gamma;
  Expression M = var(chart.p(0, 0));
  Expression P = var(chart.p(1, 0));
  Expression kinetic = pow(M, 2) / Expression(2.0 * spec_.g[0][0] * rho_);
  Expression internal = Expression(gm / (gm - 1.0) * std::pow(C_, 1.0 / gm)) *
                        exp(Expression(1.0 - 1.0 / gm) * ln(P));
  return HamiltonianSection(chart, simplify(kinetic + internal));
}

// ---------------------------------------------------------------------------

LieAlgebraSpec::LieAlgebraSpec(std::string name, std::vector<Matrix> c)
    : name_(std::move(name)), c_(std::move(c)) {
  const std::size_t n = c_.size();
  if (n == 0) throw Error("Lie algebra must have positive dimension");
  for (const auto& m : c_) require_square(m, n, "structure constants");
  if (antisymmetry_defect() > 1e-12) {
    throw Error("structure constants of '" + name_ +
                "' are not antisymmetric in the lower indices");
  }
  if (jacobi_defect() > 1e-12) {
    throw Error("structure constants of '" + name_ +
                "' violate the Jacobi identity");
  }
}

LieAlgebraSpec LieAlgebraSpec::abelian(int n) {
  return LieAlgebraSpec("abelian",
                        std::vector<Matrix>(n, Matrix(n, std::vector<double>(n))));
}

LieAlgebraSpec LieAlgebraSpec::su2() {
  std::vector<Matrix> c(3, Matrix(3, std::vector<double>(3, 0.0)));
  // c^g_{ab} = epsilon_{abg}
  c[2][0][1] = 1.0;
  c[2][1][0] = -1.0;
  c[0][1][2] = 1.0;
  c[0][2][1] = -1.0;
  c[1][2][0] = 1.0;
  c[1][0][2] = -1.0;
  return LieAlgebraSpec("su2", std::move(c));
}

double LieAlgebraSpec::antisymmetry_defect() const {
  double worst = 0.0;
  const int n = dim();
  for (int g = 0; g < n; ++g) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        worst = std::max(worst, std::fabs(c_[g][a][b] + c_[g][b][a]));
      }
    }
  }
  return worst;
}

double LieAlgebraSpec::jacobi_defect() const {
  double worst = 0.0;
  const int n = dim();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int g = 0; g < n; ++g) {
        for (int s = 0; s < n; ++s) {
          double acc = 0.0;
          for (int mu = 0; mu < n; ++mu) {
            acc += c_[mu][a][b] * c_[s][mu][g] + c_[mu][b][g] * c_[s][mu][a] +
                   c_[mu][g][a] * c_[s][mu][b];
          }
          worst = std::max(worst, std::fabs(acc));
        }
      }
    }
  }
  return worst;
}

Expression YangMillsModel::pi(int i, int j, int alpha) const {
  if (i == j) return Expression();
  return var(p(i, j, alpha)) - var(p(j, i, alpha));
}

namespace {

// Assembles H1 from a callback giving pi^{ij}_alpha for i < j.
template <class PiFn>
Expression assemble_h1(const LieAlgebraSpec& la, int m,
                       const std::vector<double>& metric,
                       const std::function<std::string(int, int)>& u_name,
                       PiFn pi_upper) {
  const int n = la.dim();
  auto pi = [&](int i, int j, int a) -> Expression {
    if (i == j) return Expression();
    return i < j ? pi_upper(i, j, a) : -pi_upper(j, i, a);
  };
  Expression quad;
  Expression cubic;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      for (int a = 0; a < n; ++a) {
        quad = quad + Expression(metric[i] * metric[j]) * pi(i, j, a) * pi(i, j, a);
        for (int b = 0; b < n; ++b) {
          for (int g = 0; g < n; ++g) {
            double c = la.c(g, a, b);
            if (c == 0.0) continue;
            cubic = cubic + Expression(c) * var(u_name(a, i)) *
                                var(u_name(b, j)) * pi(i, j, g);
          }
        }
      }
    }
  }
  return simplify(quad / Expression(16.0) + cubic / Expression(4.0));
}

}  // namespace

YangMillsModel model_yang_mills(const LieAlgebraSpec& la, int m,
                                std::vector<double> metric) {
  if (m < 2) throw Error("Yang-Mills needs base dimension m >= 2");
  if (metric.empty()) metric.assign(m, 1.0);
  if (metric.size() != static_cast<std::size_t>(m)) {
    throw Error("diagonal base metric must have m entries");
  }
  for (double gi : metric) {
    if (gi == 0.0) throw Error("base metric must be non-degenerate");
  }
  Chart chart(m, la.dim() * m);
  YangMillsModel ym{la, m, metric, chart, HamiltonianSection(chart, 0.0)};
  auto u_name = [&](int a, int i) { return ym.u(a, i); };
  Expression H = assemble_h1(la, m, metric, u_name,
                             [&](int i, int j, int a) { return ym.pi(i, j, a); });
  ym.h = HamiltonianSection(chart, H);
  return ym;
}

Expression yang_mills_reduced_hamiltonian(const YangMillsModel& ym) {
  auto u_name = [&](int a, int i) { return ym.u(a, i); };
  return assemble_h1(ym.algebra, ym.m, ym.metric, u_name, [](int i, int j, int a) {
    return var("pi" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
               std::to_string(a + 1));
  });
}

std::vector<Matrix> curvature(const Matrix& u, const std::vector<Matrix>& du,
                              const LieAlgebraSpec& la) {
  const int n = la.dim();
  if (u.size() != static_cast<std::size_t>(n) ||
      du.size() != static_cast<std::size_t>(n)) {
    throw Error("curvature: field arrays must have one row per algebra index");
  }
  const std::size_t m = u[0].size();
  for (int g = 0; g < n; ++g) {
    if (u[g].size() != m) throw Error("curvature: ragged potential array");
    require_square(du[g], m, "potential derivative");
  }
  std::vector<Matrix> F(n, Matrix(m, std::vector<double>(m, 0.0)));
  for (int g = 0; g < n; ++g) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = 0; l < m; ++l) {
        double acc = du[g][l][k] - du[g][k][l];
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) acc += la.c(g, a, b) * u[a][k] * u[b][l];
        }
        F[g][k][l] = acc;
      }
    }
  }
  return F;
}

}  // namespace hdw
