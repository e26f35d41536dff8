#include "hdw/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace hdw {

namespace {

using Field = std::vector<std::vector<double>>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// out = base + s * d
Field axpy(const Field& base, double s, const Field& d) {
  Field out = base;
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t k = 0; k < out[a].size(); ++k) out[a][k] += s * d[a][k];
  }
  return out;
}

Field rk4_combine(const Field& y, double dt, const Field& k1, const Field& k2,
                  const Field& k3, const Field& k4) {
  Field out = y;
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t k = 0; k < out[a].size(); ++k) {
      out[a][k] += dt / 6.0 *
                   (k1[a][k] + 2.0 * k2[a][k] + 2.0 * k3[a][k] + k4[a][k]);
    }
  }
  return out;
}

}  // namespace

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "dirichlet";
}

std::string to_string(Reconstruction r) {
  return r == Reconstruction::ClosedForm ? "closed_form" : "newton";
}

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "dirichlet") return Boundary::Dirichlet;
  throw Error("unknown boundary '" + s + "' (expected periodic or dirichlet)");
}

Reconstruction parse_reconstruction(const std::string& s) {
  if (s == "closed_form") return Reconstruction::ClosedForm;
  if (s == "newton") return Reconstruction::Newton;
  throw Error("unknown reconstruction '" + s +
              "' (expected closed_form or newton)");
}

void SolverConfig::validate() const {
  if (!(dt > 0)) throw Error("solver dt must be positive");
  if (K < 8) throw Error("solver needs K >= 8 grid points");
  if (!(x_max > x_min)) throw Error("solver domain must have x_max > x_min");
  if (!(t_final >= t0)) throw Error("solver t_final must not precede t0");
  if (scheme != "rk4") throw Error("unknown scheme '" + scheme + "' (expected rk4)");
  if (snapshot_every < 1) throw Error("snapshot_every must be >= 1");
  if (!(newton_tol > 0) || newton_max_iter < 1) {
    throw Error("Newton tolerance and iteration limit must be positive");
  }
}

double SolverConfig::dx() const {
  return boundary == Boundary::Periodic ? (x_max - x_min) / K
                                        : (x_max - x_min) / (K - 1);
}

double SolverConfig::grid_point(int k) const { return x_min + k * dx(); }

int SolverConfig::steps() const {
  const double span = t_final - t0;
  if (span <= 0) return 0;
  const double r = span / dt;
  return std::max(1, static_cast<int>(std::ceil(r - 1e-9 * r)));
}

double SolverConfig::step_size() const {
  int n = steps();
  return n == 0 ? dt : (t_final - t0) / n;
}

// ---------------------------------------------------------------------------

OdeSystem::OdeSystem(const HamiltonianSection& h) : chart_(h.chart()) {
  if (chart_.m() != 1) throw Error("ODE integration needs a chart with m = 1");
  auto names = chart_.all_names();
  for (int a = 0; a < chart_.n(); ++a) {
    dHdu_.emplace_back(diff(h.H(), chart_.u(a)), names);
    dHdp_.emplace_back(diff(h.H(), chart_.p(0, a)), names);
  }
  H_ = CompiledExpression(h.H(), names);
}

void OdeSystem::rhs(double t, std::span<const double> u,
                    std::span<const double> p, std::span<double> du,
                    std::span<double> dp) const {
  const int n = chart_.n();
  std::vector<double> values(1 + 2 * n);
  values[0] = t;
  for (int a = 0; a < n; ++a) {
    values[1 + a] = u[a];
    values[1 + n + a] = p[a];
  }
  for (int a = 0; a < n; ++a) {
    du[a] = dHdp_[a](values);
    dp[a] = -dHdu_[a](values);
  }
}

double OdeSystem::energy(const OdeState& s) const {
  const int n = chart_.n();
  std::vector<double> values(1 + 2 * n);
  values[0] = s.t;
  for (int a = 0; a < n; ++a) {
    values[1 + a] = s.u[a];
    values[1 + n + a] = s.p[a];
  }
  return H_(values);
}

OdeState step_ode_rk4(const OdeState& s, const OdeSystem& sys, double dt) {
  const std::size_t n = s.u.size();
  if (n != static_cast<std::size_t>(sys.chart().n()) || s.p.size() != n) {
    throw Error("ODE state does not match the chart");
  }
  std::vector<double> k1u(n), k1p(n), k2u(n), k2p(n), k3u(n), k3p(n), k4u(n),
      k4p(n), tu(n), tp(n);
  auto stage = [&](double c, const std::vector<double>& du,
                   const std::vector<double>& dp) {
    for (std::size_t a = 0; a < n; ++a) {
      tu[a] = s.u[a] + c * du[a];
      tp[a] = s.p[a] + c * dp[a];
    }
  };
  sys.rhs(s.t, s.u, s.p, k1u, k1p);
  stage(dt / 2, k1u, k1p);
  sys.rhs(s.t + dt / 2, tu, tp, k2u, k2p);
  stage(dt / 2, k2u, k2p);
  sys.rhs(s.t + dt / 2, tu, tp, k3u, k3p);
  stage(dt, k3u, k3p);
  sys.rhs(s.t + dt, tu, tp, k4u, k4p);
  OdeState out = s;
  for (std::size_t a = 0; a < n; ++a) {
    out.u[a] += dt / 6.0 * (k1u[a] + 2 * k2u[a] + 2 * k3u[a] + k4u[a]);
    out.p[a] += dt / 6.0 * (k1p[a] + 2 * k2p[a] + 2 * k3p[a] + k4p[a]);
  }
  out.t = s.t + dt;
  for (std::size_t a = 0; a < n; ++a) {
    if (!std::isfinite(out.u[a]) || !std::isfinite(out.p[a])) {
      throw NumericError("ODE state became non-finite at t=" + fmt(out.t));
    }
  }
  return out;
}

OdeState step_ode_rk4(const OdeState& s, const HamiltonianSection& h,
                      double dt) {
  return step_ode_rk4(s, OdeSystem(h), dt);
}

std::vector<OdeState> integrate_ode(const OdeState& s0,
                                    const HamiltonianSection& h, double dt,
                                    double t_final) {
  if (!(dt > 0)) throw Error("dt must be positive");
  OdeSystem sys(h);
  SolverConfig c;
  c.dt = dt;
  c.t0 = s0.t;
  c.t_final = t_final;
  const int steps = c.steps();
  const double step = c.step_size();
  std::vector<OdeState> out;
  out.reserve(steps + 1);
  out.push_back(s0);
  for (int k = 0; k < steps; ++k) {
    OdeState next = step_ode_rk4(out.back(), sys, step);
    next.t = s0.t + (k + 1) * step;
    out.push_back(std::move(next));
  }
  return out;
}

// ---------------------------------------------------------------------------

FieldModel field_model(const std::string& name, const HamiltonianSection& h) {
  if (h.chart().m() != 2) {
    throw Error("field models need a chart with m = 2 (time and one space "
                "coordinate)");
  }
  return FieldModel{name, h, nullptr};
}

FieldModel wave_field_model(const ContinuumSpec& spec) {
  FieldModel fm = field_model("wave", model_wave(spec));
  // dH/dP = -P G / (g rho) = ux
  const double g = spec.g[0][0];
  const double G = spec.G[0][0];
  auto rho = std::make_shared<CompiledExpression>(spec.rho,
                                                  std::vector<std::string>{"x2"});
  fm.closed_form = [g, G, rho](double, double x, std::span<const double>,
                               std::span<const double>,
                               std::span<const double> ux, std::span<double> P) {
    const double r = (*rho)(std::span<const double>(&x, 1));
    P[0] = -r * g * ux[0] / G;
  };
  return fm;
}

FieldModel perfect_gas_field_model(const PerfectGas& gas) {
  FieldModel fm = field_model("perfect_gas", gas.hamiltonian());
  fm.closed_form = [gas](double, double, std::span<const double>,
                         std::span<const double>, std::span<const double> ux,
                         std::span<double> P) { P[0] = gas.momentum(ux[0]); };
  return fm;
}

std::vector<double> grid_derivative(const std::vector<double>& f, double dx,
                                    Boundary b) {
  const std::size_t K = f.size();
  if (K < 3) throw Error("grid derivative needs at least 3 points");
  std::vector<double> d(K);
  for (std::size_t k = 1; k + 1 < K; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2 * dx);
  if (b == Boundary::Periodic) {
    d[0] = (f[1] - f[K - 1]) / (2 * dx);
    d[K - 1] = (f[0] - f[K - 2]) / (2 * dx);
  } else {
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dx);
    d[K - 1] = (3 * f[K - 1] - 4 * f[K - 2] + f[K - 3]) / (2 * dx);
  }
  return d;
}

FieldSystem::FieldSystem(FieldModel model, SolverConfig config)
    : model_(std::move(model)), config_(std::move(config)) {
  config_.validate();
  const Chart& chart = model_.h.chart();
  if (chart.m() != 2) throw Error("field solver needs m = 2");
  if (config_.reconstruction == Reconstruction::ClosedForm &&
      !model_.closed_form) {
    throw Error("model '" + model_.name +
                "' has no closed-form P reconstruction; use newton");
  }
  n_ = chart.n();
  slots_ = chart.all_names();
  const Expression& H = model_.h.H();
  d2HdP2_.resize(n_);
  for (int a = 0; a < n_; ++a) {
    dHdM_.emplace_back(diff(H, chart.p(0, a)), slots_);
    Expression dP = diff(H, chart.p(1, a));
    dHdP_.emplace_back(dP, slots_);
    dHdu_.emplace_back(diff(H, chart.u(a)), slots_);
    for (int b = 0; b < n_; ++b) {
      d2HdP2_[a].emplace_back(diff(dP, chart.p(1, b)), slots_);
    }
  }
}

void FieldSystem::fill(std::vector<double>& values, double t, double x,
                       std::span<const double> u, std::span<const double> M,
                       std::span<const double> P) const {
  values.resize(2 + 3 * n_);
  values[0] = t;
  values[1] = x;
  for (int a = 0; a < n_; ++a) {
    values[2 + a] = u[a];
    values[2 + n_ + a] = M[a];
    values[2 + 2 * n_ + a] = P[a];
  }
}

void FieldSystem::gradients(double t, double x, std::span<const double> u,
                            std::span<const double> M,
                            std::span<const double> P, std::span<double> dM,
                            std::span<double> dP, std::span<double> du) const {
  std::vector<double> values;
  fill(values, t, x, u, M, P);
  for (int a = 0; a < n_; ++a) {
    dM[a] = dHdM_[a](values);
    dP[a] = dHdP_[a](values);
    du[a] = dHdu_[a](values);
  }
}

GridSection FieldSystem::initial_section(
    const std::vector<std::function<double(double)>>& u0,
    const std::vector<std::function<double(double)>>& M0) const {
  if (u0.size() != static_cast<std::size_t>(n_) ||
      M0.size() != static_cast<std::size_t>(n_)) {
    throw Error("initial data needs " + std::to_string(n_) +
                " u and M components");
  }
  GridSection s;
  s.t = config_.t0;
  const int K = config_.K;
  s.x.resize(K);
  for (int k = 0; k < K; ++k) s.x[k] = config_.grid_point(k);
  s.u.assign(n_, std::vector<double>(K));
  s.M.assign(n_, std::vector<double>(K));
  for (int a = 0; a < n_; ++a) {
    for (int k = 0; k < K; ++k) {
      s.u[a][k] = u0[a](s.x[k]);
      s.M[a][k] = M0[a](s.x[k]);
    }
  }
  s.P = reconstruct_P(s.t, s.u, s.M, nullptr);
  return s;
}

Field FieldSystem::reconstruct_P(double t, const Field& u, const Field& M,
                                 const Field* warm) const {
  const int K = config_.K;
  const double dx = config_.dx();
  Field ux(n_);
  for (int a = 0; a < n_; ++a) {
    if (u[a].size() != static_cast<std::size_t>(K)) {
      throw Error("field array length does not match K");
    }
    ux[a] = grid_derivative(u[a], dx, config_.boundary);
  }
  Field P(n_, std::vector<double>(K, 0.0));
  std::vector<double> ua(n_), Ma(n_), uxa(n_), Pa(n_), values;
  Eigen::MatrixXd J(n_, n_);
  Eigen::VectorXd G(n_);
  for (int k = 0; k < K; ++k) {
    const double x = config_.grid_point(k);
    for (int a = 0; a < n_; ++a) {
      ua[a] = u[a][k];
      Ma[a] = M[a][k];
      uxa[a] = ux[a][k];
      Pa[a] = warm ? (*warm)[a][k] : 0.0;
    }
    if (config_.reconstruction == Reconstruction::ClosedForm) {
      model_.closed_form(t, x, ua, Ma, uxa, Pa);
    } else {
      double scale = 1.0;
      for (double v : uxa) scale = std::max(scale, std::fabs(v));
      const double tol = config_.newton_tol * scale;
      auto residual = [&](const std::vector<double>& Pt, Eigen::VectorXd& out) {
        fill(values, t, x, ua, Ma, Pt);
        double worst = 0.0;
        for (int a = 0; a < n_; ++a) {
          out(a) = dHdP_[a](values) - uxa[a];
          worst = std::max(worst, std::fabs(out(a)));
        }
        return worst;
      };
      auto safe_residual = [&](const std::vector<double>& Pt,
                               Eigen::VectorXd& out) {
        try {
          double r = residual(Pt, out);
          return std::isfinite(r) ? r : INFINITY;
        } catch (const DomainError&) {
          return static_cast<double>(INFINITY);
        }
      };
      double r = safe_residual(Pa, G);
      if (!std::isfinite(r)) {
        // Fall back to a unit start inside the usual domain of H.
        std::fill(Pa.begin(), Pa.end(), 1.0);
        r = safe_residual(Pa, G);
      }
      int it = 0;
      while (r > tol && it < config_.newton_max_iter) {
        ++it;
        for (int a = 0; a < n_; ++a) {
          for (int b = 0; b < n_; ++b) J(a, b) = d2HdP2_[a][b](values);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd step = lu.solve(G);
        std::vector<double> trial(n_);
        double lambda = 1.0;
        double rt = INFINITY;
        Eigen::VectorXd Gt(n_);
        for (int half = 0; half < 30; ++half) {
          for (int a = 0; a < n_; ++a) trial[a] = Pa[a] - lambda * step(a);
          rt = safe_residual(trial, Gt);
          if (std::isfinite(rt) && (rt < r || half == 29)) break;
          lambda *= 0.5;
        }
        if (!std::isfinite(rt)) break;
        Pa = trial;
        r = rt;
        G = Gt;
        fill(values, t, x, ua, Ma, Pa);
      }
      if (!(r <= tol)) {
        throw NumericError("Newton reconstruction of P failed at grid index " +
                           std::to_string(k) + " (x=" + fmt(x) +
                           ", t=" + fmt(t) + "): residual " + fmt(r) +
                           " after " + std::to_string(it) + " iterations");
      }
    }
    for (int a = 0; a < n_; ++a) P[a][k] = Pa[a];
  }
  return P;
}

void FieldSystem::rhs(double t, const Field& u, const Field& M, const Field& P,
                      Field& du, Field& dM) const {
  const int K = config_.K;
  const double dx = config_.dx();
  du.assign(n_, std::vector<double>(K));
  dM.assign(n_, std::vector<double>(K));
  Field Px(n_);
  for (int a = 0; a < n_; ++a) Px[a] = grid_derivative(P[a], dx, config_.boundary);
  std::vector<double> ua(n_), Ma(n_), Pa(n_), gM(n_), gP(n_), gu(n_);
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < n_; ++a) {
      ua[a] = u[a][k];
      Ma[a] = M[a][k];
      Pa[a] = P[a][k];
    }
    gradients(t, config_.grid_point(k), ua, Ma, Pa, gM, gP, gu);
    for (int a = 0; a < n_; ++a) {
      du[a][k] = gM[a];
      dM[a][k] = -gu[a] - Px[a][k];
    }
  }
  if (config_.boundary == Boundary::Dirichlet) {
    for (int a = 0; a < n_; ++a) {
      du[a][0] = du[a][K - 1] = 0.0;
      dM[a][0] = dM[a][K - 1] = 0.0;
    }
  }
}

GridSection FieldSystem::step(const GridSection& s, double dt) const {
  Field k1u, k1M, k2u, k2M, k3u, k3M, k4u, k4M;
  const Field& P1 = s.P;
  rhs(s.t, s.u, s.M, P1, k1u, k1M);
  Field u2 = axpy(s.u, dt / 2, k1u), M2 = axpy(s.M, dt / 2, k1M);
  Field P2 = reconstruct_P(s.t + dt / 2, u2, M2, &P1);
  rhs(s.t + dt / 2, u2, M2, P2, k2u, k2M);
  Field u3 = axpy(s.u, dt / 2, k2u), M3 = axpy(s.M, dt / 2, k2M);
  Field P3 = reconstruct_P(s.t + dt / 2, u3, M3, &P2);
  rhs(s.t + dt / 2, u3, M3, P3, k3u, k3M);
  Field u4 = axpy(s.u, dt, k3u), M4 = axpy(s.M, dt, k3M);
  Field P4 = reconstruct_P(s.t + dt, u4, M4, &P3);
  rhs(s.t + dt, u4, M4, P4, k4u, k4M);
  GridSection out;
  out.t = s.t + dt;
  out.x = s.x;
  out.u = rk4_combine(s.u, dt, k1u, k2u, k3u, k4u);
  out.M = rk4_combine(s.M, dt, k1M, k2M, k3M, k4M);
  out.P = reconstruct_P(out.t, out.u, out.M, &P4);
  for (const auto* f : {&out.u, &out.M, &out.P}) {
    for (const auto& row : *f) {
      for (double v : row) {
        if (!std::isfinite(v)) {
          throw NumericError("field became non-finite at t=" + fmt(out.t));
        }
      }
    }
  }
  return out;
}

FieldRun evolve_field(const FieldModel& model, const SolverConfig& config,
                      const GridSection& initial) {
  FieldSystem sys(model, config);
  FieldRun run;
  run.steps = config.steps();
  run.dt = config.step_size();
  if (run.dt > 0.5 * config.dx()) {
    run.warnings.push_back("CFL advisory: dt=" + fmt(run.dt) +
                           " exceeds 0.5*dx=" + fmt(0.5 * config.dx()));
  }
  GridSection s = initial;
  if (s.P.empty()) s.P = sys.reconstruct_P(s.t, s.u, s.M, nullptr);
  run.trajectory.push_back(s);
  for (int k = 0; k < run.steps; ++k) {
    s = sys.step(s, run.dt);
    s.t = config.t0 + (k + 1) * run.dt;
    if ((k + 1) % config.snapshot_every == 0 || k + 1 == run.steps) {
      run.trajectory.push_back(s);
    }
  }
  return run;
}

Field reconstruct_P(const FieldModel& model, const SolverConfig& config,
                    double t, const Field& u, const Field& M) {
  return FieldSystem(model, config).reconstruct_P(t, u, M, nullptr);
}

// ---------------------------------------------------------------------------

void Norms::add(double r, double weight) {
  max = std::max(max, std::fabs(r));
  l2 += r * r * weight;
  ++count;
}

void Norms::finish() { l2 = std::sqrt(l2); }

namespace {

double uniform_spacing(const std::vector<double>& t) {
  const double dt = t[1] - t[0];
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    if (std::fabs((t[k + 1] - t[k]) - dt) > 1e-9 * std::fabs(dt)) {
      throw Error("residual needs equally spaced snapshots");
    }
  }
  if (!(dt > 0)) throw Error("snapshots must advance in time");
  return dt;
}

}  // namespace

std::vector<Norms> hdw_residual(const std::vector<GridSection>& traj,
                                const HamiltonianSection& h, Boundary b) {
  if (traj.size() < 3) throw Error("residual needs at least 3 snapshots");
  std::vector<double> times;
  for (const auto& s : traj) times.push_back(s.t);
  const double dt = uniform_spacing(times);
  const Chart& chart = h.chart();
  if (chart.m() != 2) throw Error("grid residual needs m = 2");
  const int n = chart.n();
  const auto& x = traj[0].x;
  const int K = static_cast<int>(x.size());
  const double dx = x[1] - x[0];
  auto names = chart.all_names();
  std::vector<CompiledExpression> dM, dP, du;
  for (int a = 0; a < n; ++a) {
    dM.emplace_back(diff(h.H(), chart.p(0, a)), names);
    dP.emplace_back(diff(h.H(), chart.p(1, a)), names);
    du.emplace_back(diff(h.H(), chart.u(a)), names);
  }
  std::vector<Norms> out{{"du/dt - dH/dM"}, {"du/dx - dH/dP"},
                         {"dM/dt + dP/dx + dH/du"}};
  std::vector<double> values(2 + 3 * n);
  for (std::size_t s = 1; s + 1 < traj.size(); ++s) {
    const GridSection& cur = traj[s];
    std::vector<std::vector<double>> ux(n), Px(n);
    for (int a = 0; a < n; ++a) {
      ux[a] = grid_derivative(cur.u[a], dx, b);
      Px[a] = grid_derivative(cur.P[a], dx, b);
    }
    const int k0 = b == Boundary::Periodic ? 0 : 1;
    const int k1 = b == Boundary::Periodic ? K : K - 1;
    for (int k = k0; k < k1; ++k) {
      values[0] = cur.t;
      values[1] = x[k];
      for (int a = 0; a < n; ++a) {
        values[2 + a] = cur.u[a][k];
        values[2 + n + a] = cur.M[a][k];
        values[2 + 2 * n + a] = cur.P[a][k];
      }
      for (int a = 0; a < n; ++a) {
        double ut = (traj[s + 1].u[a][k] - traj[s - 1].u[a][k]) / (2 * dt);
        double Mt = (traj[s + 1].M[a][k] - traj[s - 1].M[a][k]) / (2 * dt);
        out[0].add(ut - dM[a](values), dx * dt);
        out[1].add(ux[a][k] - dP[a](values), dx * dt);
        out[2].add(Mt + Px[a][k] + du[a](values), dx * dt);
      }
    }
  }
  for (auto& nrm : out) nrm.finish();
  return out;
}

std::vector<Norms> hdw_residual(const std::vector<OdeState>& traj,
                                const HamiltonianSection& h) {
  if (traj.size() < 3) throw Error("residual needs at least 3 snapshots");
  std::vector<double> times;
  for (const auto& s : traj) times.push_back(s.t);
  const double dt = uniform_spacing(times);
  OdeSystem sys(h);
  const std::size_t n = traj[0].u.size();
  std::vector<Norms> out{{"du/dt - dH/dp"}, {"dp/dt + dH/du"}};
  std::vector<double> fu(n), fp(n);
  for (std::size_t s = 1; s + 1 < traj.size(); ++s) {
    sys.rhs(traj[s].t, traj[s].u, traj[s].p, fu, fp);
    for (std::size_t a = 0; a < n; ++a) {
      double ut = (traj[s + 1].u[a] - traj[s - 1].u[a]) / (2 * dt);
      double pt = (traj[s + 1].p[a] - traj[s - 1].p[a]) / (2 * dt);
      out[0].add(ut - fu[a], dt);
      out[1].add(pt - fp[a], dt);
    }
  }
  for (auto& nrm : out) nrm.finish();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_1p1(const YangMillsModel& ym) {
  if (ym.m != 2) {
    throw Error("Yang-Mills evolution is implemented for 1+1 dimensions");
  }
}

// Time derivatives in temporal gauge: dA/dt = F_01 = -1/2 g00 g11 E and
// dE/dt = -c^g_{ab} u^b_0 E_g with u_0 = 0.
void ym_rhs(const YangMillsModel& ym, const Field& A, const Field& E,
            Field& dA, Field& dE) {
  const int n = ym.algebra.dim();
  const std::size_t K = A[0].size();
  const double lower = ym.metric[0] * ym.metric[1];
  dA.assign(n, std::vector<double>(K));
  dE.assign(n, std::vector<double>(K));
  std::vector<double> u0(n, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (int a = 0; a < n; ++a) {
      dA[a][k] = -0.5 * lower * E[a][k];
      double acc = 0.0;
      for (int b = 0; b < n; ++b) {
        for (int g = 0; g < n; ++g) acc += ym.algebra.c(g, a, b) * u0[b] * E[g][k];
      }
      dE[a][k] = -acc;
    }
  }
  (void)A;
}

}  // namespace

YangMillsRun evolve_yang_mills(const YangMillsModel& ym,
                               const SolverConfig& config,
                               const YangMillsSection& initial) {
  require_1p1(ym);
  config.validate();
  const int n = ym.algebra.dim();
  if (initial.A.size() != static_cast<std::size_t>(n) ||
      initial.E.size() != static_cast<std::size_t>(n)) {
    throw Error("Yang-Mills data needs one row per algebra index");
  }
  YangMillsRun run;
  run.steps = config.steps();
  run.dt = config.step_size();
  const double dt = run.dt;
  YangMillsSection s = initial;
  run.trajectory.push_back(s);
  const std::size_t K = s.x.size();
  for (int step = 0; step < run.steps; ++step) {
    Field k1A, k1E, k2A, k2E, k3A, k3E, k4A, k4E;
    ym_rhs(ym, s.A, s.E, k1A, k1E);
    ym_rhs(ym, axpy(s.A, dt / 2, k1A), axpy(s.E, dt / 2, k1E), k2A, k2E);
    ym_rhs(ym, axpy(s.A, dt / 2, k2A), axpy(s.E, dt / 2, k2E), k3A, k3E);
    ym_rhs(ym, axpy(s.A, dt, k3A), axpy(s.E, dt, k3E), k4A, k4E);
    if (config.boundary == Boundary::Dirichlet) {
      for (Field* f : {&k1A, &k1E, &k2A, &k2E, &k3A, &k3E, &k4A, &k4E}) {
        for (auto& row : *f) row[0] = row[K - 1] = 0.0;
      }
    }
    s.A = rk4_combine(s.A, dt, k1A, k2A, k3A, k4A);
    s.E = rk4_combine(s.E, dt, k1E, k2E, k3E, k4E);
    s.t = config.t0 + (step + 1) * dt;
    if ((step + 1) % config.snapshot_every == 0 || step + 1 == run.steps) {
      run.trajectory.push_back(s);
    }
  }
  return run;
}

Norms gauss_residual(const YangMillsSection& s, const YangMillsModel& ym,
                     Boundary b) {
  require_1p1(ym);
  const int n = ym.algebra.dim();
  const int K = static_cast<int>(s.x.size());
  const double dx = s.x[1] - s.x[0];
  Norms out{"gauss"};
  Field Ex(n);
  for (int a = 0; a < n; ++a) Ex[a] = grid_derivative(s.E[a], dx, b);
  const int k0 = b == Boundary::Periodic ? 0 : 1;
  const int k1 = b == Boundary::Periodic ? K : K - 1;
  for (int k = k0; k < k1; ++k) {
    for (int a = 0; a < n; ++a) {
      double acc = -Ex[a][k];
      for (int be = 0; be < n; ++be) {
        for (int g = 0; g < n; ++g) {
          acc -= ym.algebra.c(g, a, be) * s.A[be][k] * s.E[g][k];
        }
      }
      out.add(acc, dx);
    }
  }
  out.finish();
  return out;
}

std::vector<Norms> ym_residual(const std::vector<YangMillsSection>& traj,
                               const YangMillsModel& ym, Boundary b) {
  require_1p1(ym);
  if (traj.size() < 3) throw Error("residual needs at least 3 snapshots");
  if (traj[0].x.size() < 8) throw Error("grid too small for the stencil");
  std::vector<double> times;
  for (const auto& s : traj) times.push_back(s.t);
  const double dt = uniform_spacing(times);
  const int n = ym.algebra.dim();
  const int K = static_cast<int>(traj[0].x.size());
  const double dx = traj[0].x[1] - traj[0].x[0];
  const double lower = ym.metric[0] * ym.metric[1];
  std::vector<Norms> out{{"F^01 + pi^01/2"}, {"gauss"}, {"dE/dt"}};
  const int k0 = b == Boundary::Periodic ? 0 : 1;
  const int k1 = b == Boundary::Periodic ? K : K - 1;
  for (std::size_t s = 1; s + 1 < traj.size(); ++s) {
    const auto& cur = traj[s];
    Field Ex(n);
    for (int a = 0; a < n; ++a) Ex[a] = grid_derivative(cur.E[a], dx, b);
    for (int k = k0; k < k1; ++k) {
      for (int a = 0; a < n; ++a) {
        // u_0 = 0: F_01 = d_0 u_1 - d_1 u_0 + c u_0 u_1 = dA/dt
        double F01 = (traj[s + 1].A[a][k] - traj[s - 1].A[a][k]) / (2 * dt);
        out[0].add(F01 / lower + 0.5 * cur.E[a][k], dx * dt);
        double gauss = -Ex[a][k];
        for (int be = 0; be < n; ++be) {
          for (int g = 0; g < n; ++g) {
            gauss -= ym.algebra.c(g, a, be) * cur.A[be][k] * cur.E[g][k];
          }
        }
        out[1].add(gauss, dx * dt);
        double Et = (traj[s + 1].E[a][k] - traj[s - 1].E[a][k]) / (2 * dt);
        out[2].add(Et, dx * dt);
      }
    }
  }
  for (auto& nrm : out) nrm.finish();
  return out;
}

}  // namespace hdw
