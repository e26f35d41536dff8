#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hdw/solver.hpp"
#include "support.hpp"

using namespace hdw;

namespace {

SolverConfig wave_config(int K, double T = 1.0) {
  SolverConfig c;
  c.K = K;
  c.dt = c.dx() / 4;
  c.t_final = T;
  c.reconstruction = Reconstruction::ClosedForm;
  return c;
}

GridSection wave_initial(const FieldSystem& sys) {
  return sys.initial_section({[](double x) { return std::sin(x); }},
                             {[](double x) { return -std::cos(x); }});
}

double wave_error(int K) {
  auto cfg = wave_config(K);
  FieldSystem sys(wave_field_model(), cfg);
  auto run = evolve_field(wave_field_model(), cfg, wave_initial(sys));
  const auto& s = run.trajectory.back();
  double err = 0.0;
  for (int k = 0; k < K; ++k) {
    err = std::max(err, std::fabs(s.u[0][k] - std::sin(s.x[k] - s.t)));
  }
  return err;
}

}  // namespace

TEST_CASE("config validation and step sizes") {
  SolverConfig c;
  CHECK_THROWS_AS(c.validate(), Error);
  c.dt = 0.3;
  c.t_final = 1.0;
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps() == 4);
  CHECK(c.step_size() == doctest::Approx(0.25));
  c.dt = 0.1;
  CHECK(c.steps() == 10);
  c.K = 4;
  CHECK_THROWS_AS(c.validate(), Error);
  c.K = 16;
  c.scheme = "euler";
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_boundary("dirichlet") == Boundary::Dirichlet);
  CHECK(to_string(Reconstruction::ClosedForm) == "closed_form");
  CHECK_THROWS_AS(parse_boundary("open"), Error);
}

TEST_CASE("RK4 on the harmonic oscillator") {
  auto h = model_td_mechanics(1, parse("u1^2/2"));
  OdeState s{0.0, {1.0}, {0.0}};
  auto s1 = step_ode_rk4(s, h, 0.01);
  CHECK(std::fabs(s1.u[0] - std::cos(0.01)) <= 1e-10);
  CHECK(std::fabs(s1.p[0] + std::sin(0.01)) <= 1e-10);
  CHECK(s1.t == doctest::Approx(0.01));

  auto zero = HamiltonianSection(Chart(1, 2), 0.0);
  OdeState z{0.0, {0.3, -0.2}, {1.0, 2.0}};
  auto z1 = step_ode_rk4(z, zero, 0.5);
  CHECK(z1.u == z.u);
  CHECK(z1.p == z.p);

  auto traj = integrate_ode(s, h, 1e-3, 10.0);
  OdeSystem sys(h);
  double drift = 0.0;
  for (const auto& st : traj) drift = std::max(drift, std::fabs(sys.energy(st) - 0.5));
  CHECK(drift <= 1e-8);
  CHECK(traj.back().t == doctest::Approx(10.0));

  // Global error at order 4.
  auto err = [&](double dt) {
    auto tr = integrate_ode(s, h, dt, 2.0);
    return std::fabs(tr.back().u[0] - std::cos(2.0));
  };
  const double r = err(0.04) / err(0.02);
  CHECK(r == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("ODE residual of an integrated trajectory") {
  auto h = model_td_mechanics(1, parse("u1^2/2 + x1*u1"));
  auto traj = integrate_ode({0.0, {1.0}, {0.0}}, h, 1e-3, 1.0);
  for (const auto& n : hdw_residual(traj, h)) CHECK(n.max <= 1e-5);
}

TEST_CASE("wave solution against the travelling wave") {
  const double e64 = wave_error(64);
  const double e128 = wave_error(128);
  const double e256 = wave_error(256);
  CHECK(e128 <= 1e-3);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("zero data stays zero") {
  auto cfg = wave_config(32, 0.5);
  FieldSystem sys(wave_field_model(), cfg);
  auto s0 = sys.initial_section({[](double) { return 0.0; }}, {[](double) { return 0.0; }});
  auto run = evolve_field(wave_field_model(), cfg, s0);
  for (const auto& s : run.trajectory) {
    for (double v : s.u[0]) CHECK(v == 0.0);
    for (double v : s.M[0]) CHECK(v == 0.0);
    for (double v : s.P[0]) CHECK(v == 0.0);
  }
}

TEST_CASE("P reconstruction") {
  auto cfg = wave_config(128);
  auto model = wave_field_model();
  std::vector<std::vector<double>> u(1), M(1);
  for (int k = 0; k < cfg.K; ++k) {
    u[0].push_back(std::sin(cfg.grid_point(k)));
    M[0].push_back(0.0);
  }
  auto P = reconstruct_P(model, cfg, 0.0, u, M);
  double err = 0.0;
  for (int k = 0; k < cfg.K; ++k) {
    err = std::max(err, std::fabs(P[0][k] + std::cos(cfg.grid_point(k))));
  }
  CHECK(err <= cfg.dx() * cfg.dx());

  std::vector<std::vector<double>> c(1, std::vector<double>(cfg.K, 2.5));
  auto Pc = reconstruct_P(model, cfg, 0.0, c, M);
  for (double v : Pc[0]) CHECK(v == 0.0);

  // Newton on the same Hamiltonian agrees with the closed form.
  auto newton_cfg = cfg;
  newton_cfg.reconstruction = Reconstruction::Newton;
  auto Pn = reconstruct_P(field_model("wave", model_wave()), newton_cfg, 0.0, u, M);
  for (int k = 0; k < cfg.K; ++k) CHECK(std::fabs(Pn[0][k] - P[0][k]) <= 1e-12);

  // Perfect gas: closed form is the inverse of the forward state map.
  ContinuumSpec s;
  s.gas = GasConstants{};
  PerfectGas gas(s);
  // A positive deformation needs a non-periodic displacement.
  auto gmodel = perfect_gas_field_model(gas);
  auto gcfg = cfg;
  gcfg.boundary = Boundary::Dirichlet;
  auto gnewton = gcfg;
  gnewton.reconstruction = Reconstruction::Newton;
  std::vector<std::vector<double>> ug(1);
  for (int k = 0; k < gcfg.K; ++k) {
    const double x = gcfg.grid_point(k);
    ug[0].push_back(1.2 * x + 0.1 * std::sin(x));
  }
  auto Pg = reconstruct_P(gmodel, gcfg, 0.0, ug, M);
  auto Png = reconstruct_P(field_model("gas", gas.hamiltonian()), gnewton, 0.0, ug, M);
  for (int k = 1; k + 1 < gcfg.K; ++k) {
    const double F = (ug[0][k + 1] - ug[0][k - 1]) / (2 * gcfg.dx());
    CHECK(std::fabs(gas.deformation(Pg[0][k]) - F) <= 1e-10);
    CHECK(test::rel_err(Png[0][k], Pg[0][k]) <= 1e-10);
  }
}

TEST_CASE("Newton failure is reported") {
  // dH/dP = exp(P) cannot match a negative gradient.
  Chart chart(2, 1);
  auto model = field_model("bad", HamiltonianSection(chart, parse("p1_1^2/2 + exp(p2_1)")));
  auto cfg = wave_config(16);
  cfg.reconstruction = Reconstruction::Newton;
  std::vector<std::vector<double>> u(1), M(1, std::vector<double>(16, 0.0));
  for (int k = 0; k < 16; ++k) u[0].push_back(std::sin(cfg.grid_point(k)));
  CHECK_THROWS_AS(reconstruct_P(model, cfg, 0.0, u, M), NumericError);
  cfg.reconstruction = Reconstruction::ClosedForm;
  CHECK_THROWS_AS(reconstruct_P(model, cfg, 0.0, u, M), Error);
}

TEST_CASE("HdDW residual of sampled exact solutions") {
  auto h = model_wave();
  auto sampled = [&](int K, bool stationary) {
    SolverConfig c = wave_config(K, 0.5);
    std::vector<GridSection> traj;
    const double dt = c.dx() / 4;
    for (int s = 0; s < 5; ++s) {
      GridSection g;
      g.t = s * dt;
      g.u.assign(1, {});
      g.M.assign(1, {});
      g.P.assign(1, {});
      for (int k = 0; k < K; ++k) {
        const double x = c.grid_point(k);
        g.x.push_back(x);
        g.u[0].push_back(stationary ? 0.7 : std::sin(x - g.t));
        g.M[0].push_back(stationary ? 0.0 : -std::cos(x - g.t));
        g.P[0].push_back(stationary ? 0.0 : -std::cos(x - g.t));
      }
      traj.push_back(g);
    }
    double worst = 0.0;
    for (const auto& n : hdw_residual(traj, h, Boundary::Periodic)) worst = std::max(worst, n.max);
    return worst;
  };
  CHECK(sampled(32, true) == 0.0);
  const double r64 = sampled(64, false), r128 = sampled(128, false);
  CHECK(r64 <= 1e-2);
  CHECK(r64 / r128 == doctest::Approx(4.0).epsilon(0.25));
  std::vector<GridSection> two(2);
  CHECK_THROWS_AS(hdw_residual(two, h, Boundary::Periodic), Error);
}

TEST_CASE("identical configurations give identical trajectories") {
  auto cfg = wave_config(64, 0.25);
  cfg.reconstruction = Reconstruction::Newton;
  auto model = field_model("wave", model_wave());
  FieldSystem sys(model, cfg);
  auto a = evolve_field(model, cfg, wave_initial(sys));
  auto b = evolve_field(model, cfg, wave_initial(sys));
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].u == b.trajectory[i].u);
    CHECK(a.trajectory[i].M == b.trajectory[i].M);
    CHECK(a.trajectory[i].P == b.trajectory[i].P);
  }
}

TEST_CASE("Dirichlet boundaries hold the end values") {
  auto cfg = wave_config(65, 0.5);
  cfg.boundary = Boundary::Dirichlet;
  cfg.x_max = std::numbers::pi;
  cfg.dt = cfg.dx() / 4;
  auto model = wave_field_model();
  FieldSystem sys(model, cfg);
  auto s0 = sys.initial_section({[](double x) { return std::sin(x); }},
                                {[](double) { return 0.0; }});
  auto run = evolve_field(model, cfg, s0);
  const auto& last = run.trajectory.back();
  CHECK(last.u[0].front() == s0.u[0].front());
  CHECK(last.u[0].back() == s0.u[0].back());
  // Standing wave sin(x) cos(t).
  double err = 0.0;
  for (int k = 0; k < cfg.K; ++k) {
    err = std::max(err, std::fabs(last.u[0][k] - std::sin(last.x[k]) * std::cos(last.t)));
  }
  CHECK(err <= 1e-3);
}

TEST_CASE("CFL advisory") {
  auto cfg = wave_config(32, 0.5);
  cfg.dt = cfg.dx();
  FieldSystem sys(wave_field_model(), cfg);
  auto run = evolve_field(wave_field_model(), cfg, wave_initial(sys));
  REQUIRE(run.warnings.size() == 1);
  CHECK(run.warnings[0].find("CFL") != std::string::npos);
}

TEST_CASE("Yang-Mills temporal gauge") {
  auto ym = model_yang_mills(LieAlgebraSpec::abelian(1), 2);
  SolverConfig cfg;
  cfg.K = 32;
  cfg.dt = cfg.dx() / 4;
  cfg.t_final = 0.5;
  YangMillsSection s;
  for (int k = 0; k < cfg.K; ++k) s.x.push_back(cfg.grid_point(k));
  s.A = {std::vector<double>(cfg.K, 0.0)};
  s.E = {std::vector<double>(cfg.K, 1.5)};
  auto run = evolve_yang_mills(ym, cfg, s);
  for (const auto& snap : run.trajectory) {
    for (double e : snap.E[0]) CHECK(e == 1.5);
  }
  // dA/dt = -E/2 with the identity metric.
  CHECK(run.trajectory.back().A[0][3] == doctest::Approx(-0.375));
  for (const auto& n : ym_residual(run.trajectory, ym, cfg.boundary)) CHECK(n.max <= 1e-12);

  // Random fields violate the Gauss law.
  auto su = model_yang_mills(LieAlgebraSpec::su2(), 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  YangMillsSection r;
  r.x = s.x;
  r.A.assign(3, std::vector<double>(cfg.K));
  r.E.assign(3, std::vector<double>(cfg.K));
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < cfg.K; ++k) {
      r.A[a][k] = d(rng);
      r.E[a][k] = d(rng);
    }
  }
  CHECK(gauss_residual(r, su, Boundary::Periodic).max > 1e-2);
  CHECK_THROWS_AS(evolve_yang_mills(model_yang_mills(LieAlgebraSpec::abelian(1), 3), cfg, s),
                  Error);
}
