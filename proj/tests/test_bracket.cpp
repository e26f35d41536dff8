#include <doctest.h>

#include "hdw/bracket.hpp"
#include "hdw/verify.hpp"
#include "support.hpp"

using namespace hdw;

namespace {

Current cur(std::vector<std::string> Y, std::vector<std::string> beta) {
  Current c;
  for (const auto& y : Y) c.Y.push_back(parse(y));
  for (const auto& b : beta) c.beta.push_back(parse(b));
  return c;
}

// Vector-field commutator of vertical fields by finite differences:
// [Y, Z]^a = Y^b dZ^a/du^b - Z^b dY^a/du^b.
double fd_commutator(const Current& a, const Current& b, int alpha,
                     const Chart& chart, const Binding& p) {
  double acc = 0.0;
  for (int be = 0; be < chart.n(); ++be) {
    acc += eval(a.Y[be], p) * test::fd(b.Y[alpha], chart.u(be), p) -
           eval(b.Y[be], p) * test::fd(a.Y[alpha], chart.u(be), p);
  }
  return acc;
}

}  // namespace

TEST_CASE("dh_components examples") {
  Chart c(1, 1);
  auto z = dh_components(HamiltonianSection(c, 0.0));
  CHECK(z.Au[0].is_zero());
  CHECK(z.Ap[0][0].is_zero());
  auto o = dh_components(HamiltonianSection(c, parse("u1^2/2 + p1_1^2/2")));
  CHECK(o.Au[0].str() == "u1");
  CHECK(o.Ap[0][0].str() == "p1_1");
  auto x = dh_components(HamiltonianSection(c, parse("x1*u1")));
  CHECK(x.Au[0].str() == "x1");
  CHECK(x.Ap[0][0].is_zero());
}

TEST_CASE("sharp_aff and a_hat examples") {
  PhaseComponents<double> pc{{2.0}, {{3.0}, {4.0}}};
  auto g = sharp_aff(pc);
  CHECK(g.hu == std::vector<std::vector<double>>{{3.0}, {4.0}});
  CHECK(g.hp == std::vector<double>{-2.0});
  auto back = a_hat(g);
  CHECK(back.Au == pc.Au);
  CHECK(back.Ap == pc.Ap);

  PhaseComponents<double> zero{{0.0, 0.0}, {{0.0, 0.0}}};
  auto gz = sharp_aff(zero);
  CHECK(gz.hp == std::vector<double>{0.0, 0.0});
  CHECK(a_hat(gz).Au == zero.Au);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 100; ++k) {
    PhaseComponents<double> r{{d(rng), d(rng)}, {{d(rng), d(rng)}, {d(rng), d(rng)}}};
    auto rr = a_hat(sharp_aff(r));
    CHECK(rr.Au == r.Au);
    CHECK(rr.Ap == r.Ap);
  }
}

TEST_CASE("gamma_h examples") {
  Chart c(1, 1);
  auto a = gamma_h(HamiltonianSection(c, parse("p1_1^2/2")));
  CHECK(a.hu[0][0].str() == "p1_1");
  CHECK(a.hp[0].is_zero());
  auto b = gamma_h(HamiltonianSection(c, parse("u1^2/2")));
  CHECK(b.hu[0][0].is_zero());
  CHECK(symbolically_equal(b.hp[0], parse("-u1")));
  auto k = gamma_h(HamiltonianSection(c, 4.5));
  CHECK(k.hu[0][0].is_zero());
  CHECK(k.hp[0].is_zero());
}

TEST_CASE("connection_is_hamiltonian examples") {
  std::mt19937_64 rng(2);
  Chart c1(1, 1);
  HamiltonianSection h1(c1, parse("p1_1^2/2 + u1^2/2"));
  auto pts = random_bindings(c1.all_names(), 20, -1, 1, rng);
  auto canon = canonical_connection(h1);
  auto ok = connection_is_hamiltonian(canon, h1, pts);
  CHECK(ok.hamiltonian);
  CHECK(ok.symbolic);
  auto bumped = canon;
  bumped.hp[0][0][0] = simplify(bumped.hp[0][0][0] + Expression(1.0));
  auto bad = connection_is_hamiltonian(bumped, h1, pts);
  CHECK_FALSE(bad.hamiltonian);
  CHECK(bad.max_residual == doctest::Approx(1.0).epsilon(1e-15));

  Chart c2(2, 1);
  HamiltonianSection h2(c2, parse("(p1_1^2 + p2_1^2)/2 + u1^2/2 + x1*u1*p2_1"));
  auto pts2 = random_bindings(c2.all_names(), 20, -1, 1, rng);
  auto k = canonical_connection(h2);
  Expression cc = parse("u1*x2 - 2");
  k.hp[0][0][0] = simplify(k.hp[0][0][0] + cc);
  k.hp[1][0][1] = simplify(k.hp[1][0][1] - cc);
  CHECK(connection_is_hamiltonian(k, h2, pts2).hamiltonian);

  auto wrong_u = canonical_connection(h2);
  wrong_u.hu[1][0] = simplify(wrong_u.hu[1][0] + parse("x1"));
  CHECK_FALSE(connection_is_hamiltonian(wrong_u, h2, pts2).hamiltonian);

  auto misshaped = canonical_connection(h2);
  misshaped.hp.pop_back();
  CHECK_THROWS_AS(connection_is_hamiltonian(misshaped, h2, pts2), Error);
}

TEST_CASE("bracket_affine examples") {
  // m = 1: df/dt + f_u H_p - f_p H_u with partials from finite differences.
  Chart c1(1, 1);
  Expression f = parse("u1*p1_1");
  HamiltonianSection h(c1, parse("(u1^2 + p1_1^2)/2"));
  Binding at{{"x1", 0}, {"u1", 1}, {"p1_1", 2}};
  double oracle = test::fd(f, "x1", at) +
                  test::fd(f, "u1", at) * test::fd(h.H(), "p1_1", at) -
                  test::fd(f, "p1_1", at) * test::fd(h.H(), "u1", at);
  CHECK(oracle == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(eval(bracket_affine(f, h), at) == doctest::Approx(3.0).epsilon(1e-14));

  Chart c2(2, 1);
  HamiltonianSection h2(c2, parse("(p1_1^2 + p2_1^2)/2 + u1^2/2"));
  CHECK(bracket_affine(cur({"0"}, {"1.5", "-2"}), h2).is_zero());
  Expression b = bracket_affine(cur({"1"}, {"0", "0"}), h2);
  Binding p2{{"x1", 0.3}, {"x2", -0.2}, {"u1", 3}, {"p1_1", 0.5}, {"p2_1", -0.7}};
  // Y = 1: only -dH/du^1 * Y survives.
  CHECK(-test::fd(h2.H(), "u1", p2) == doctest::Approx(-3.0).epsilon(1e-8));
  CHECK(eval(b, p2) == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK_THROWS_AS(bracket_affine(cur({"p1_1"}, {"0", "0"}), h2), Error);
}

TEST_CASE("bracket_affine expands term by term") {
  std::mt19937_64 rng(8);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  Current c = random_poly_current(chart, 2, rng).to_current("c");
  HamiltonianSection h(chart, Polynomial::random(names, names, 2, rng).to_expression());
  auto a = current_coefficients(c, chart);
  Expression b = bracket_affine(c, h);
  for (int k = 0; k < 20; ++k) {
    Binding p = test::random_binding(names, rng);
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      // d alpha^{0i}/dx^i at fixed p.
      acc += test::fd(a[i], chart.x(i), p);
      for (int al = 0; al < 2; ++al) {
        acc += test::fd(a[i], chart.u(al), p) * test::fd(h.H(), chart.p(i, al), p);
      }
    }
    for (int al = 0; al < 2; ++al) acc -= test::fd(h.H(), chart.u(al), p) * eval(c.Y[al], p);
    CHECK(std::fabs(eval(b, p) - acc) <= 1e-7);
  }
}

TEST_CASE("bracket_linear examples") {
  Chart c1(1, 1);
  Expression v = bracket_linear(parse("u1*p1_1"), parse("u1^2"), c1);
  Binding at{{"x1", 0}, {"u1", 2}, {"p1_1", 0.3}};
  double oracle = test::fd(parse("u1*p1_1"), "u1", at) * test::fd(parse("u1^2"), "p1_1", at) -
                  test::fd(parse("u1*p1_1"), "p1_1", at) * test::fd(parse("u1^2"), "u1", at);
  CHECK(oracle == doctest::Approx(-8.0).epsilon(1e-8));
  CHECK(eval(v, at) == doctest::Approx(-8.0).epsilon(1e-14));

  Chart c2(2, 1);
  CHECK(bracket_linear(cur({"1"}, {"0", "0"}), parse("u1"), c2).str() == "-1");
  CHECK(bracket_linear(cur({"0"}, {"2", "3"}), parse("u1*p1_1 + p2_1^3"), c2).is_zero());
  CHECK(bracket_linear(cur({"0"}, {"u1", "0"}), parse("7"), c2).is_zero());
}

TEST_CASE("bracket_linear is the linear part of bracket_affine") {
  std::mt19937_64 rng(9);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  for (int t = 0; t < 5; ++t) {
    Current c = random_poly_current(chart, 2, rng).to_current("c");
    Expression H = Polynomial::random(names, names, 2, rng).to_expression();
    Expression G = Polynomial::random(names, names, 2, rng).to_expression();
    const double s = 0.75;
    Expression lhs = bracket_affine(c, HamiltonianSection(chart, H + s * G)) -
                     bracket_affine(c, HamiltonianSection(chart, H));
    Expression rhs = s * bracket_linear(c, G, chart);
    for (const auto& p : random_bindings(names, 20, -1, 1, rng)) {
      CHECK(test::rel_err(eval(lhs, p), eval(rhs, p)) <= 1e-12);
    }
  }
}

TEST_CASE("current_bracket examples") {
  Chart chart(2, 1);
  Current a = cur({"1"}, {"0", "0"});
  Current b = cur({"u1"}, {"0", "0"});
  Current ab = current_bracket(a, b, chart);
  CHECK(ab.Y[0].str() == "-1");
  CHECK(ab.beta[0].is_zero());
  CHECK(ab.beta[1].is_zero());
  // Commutator oracle: [d/du, u d/du] = d/du, negated.
  Binding p{{"x1", 0.1}, {"x2", 0.2}, {"u1", 0.3}};
  CHECK(-fd_commutator(a, b, 0, chart, p) == doctest::Approx(-1.0).epsilon(1e-8));

  Current c = cur({"0"}, {"u1", "0"});
  Current ac = current_bracket(a, c, chart);
  CHECK(ac.Y[0].is_zero());
  CHECK(ac.beta[0].str() == "-1");
  CHECK(ac.beta[1].is_zero());

  Current aa = current_bracket(b, b, chart);
  CHECK(aa.Y[0].is_zero());
  CHECK_THROWS_AS(current_bracket(cur({"1"}, {"0"}), cur({"u1"}, {"0"}), Chart(1, 1)),
                  Error);
}

TEST_CASE("current_bracket matches a finite-difference commutator") {
  std::mt19937_64 rng(10);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  for (int t = 0; t < 5; ++t) {
    Current a = random_poly_current(chart, 2, rng).to_current("a");
    Current b = random_poly_current(chart, 2, rng).to_current("b");
    Current ab = current_bracket(a, b, chart);
    CHECK(validate_current(ab, chart).valid);
    for (int k = 0; k < 10; ++k) {
      Binding p = test::random_binding(names, rng);
      for (int al = 0; al < 2; ++al) {
        CHECK(std::fabs(eval(ab.Y[al], p) + fd_commutator(a, b, al, chart, p)) <= 1e-8);
      }
      for (int i = 0; i < 2; ++i) {
        // -(Y(beta_b^i) - Z(beta_a^i))
        double v = 0.0;
        for (int be = 0; be < 2; ++be) {
          v += eval(a.Y[be], p) * test::fd(b.beta[i], chart.u(be), p) -
               eval(b.Y[be], p) * test::fd(a.beta[i], chart.u(be), p);
        }
        CHECK(std::fabs(eval(ab.beta[i], p) + v) <= 1e-8);
      }
    }
  }
}

TEST_CASE("hamiltonian_field examples") {
  Chart chart(2, 1);
  auto z = hamiltonian_field(cur({"0"}, {"2", "-1"}), chart);
  CHECK(z.vu[0].is_zero());
  CHECK(z.vp[0][0].is_zero());
  CHECK(z.vp[1][0].is_zero());
  CHECK(z.vpext.is_zero());

  auto one = hamiltonian_field(cur({"1"}, {"0", "0"}), chart);
  CHECK(one.vu[0].str() == "1");
  CHECK(one.vp[0][0].is_zero());
  CHECK(one.vp[1][0].is_zero());

  auto lin = hamiltonian_field(cur({"u1"}, {"0", "0"}), chart);
  CHECK(lin.vu[0].str() == "u1");
  CHECK(symbolically_equal(lin.vp[0][0], parse("-p1_1")));
  CHECK(symbolically_equal(lin.vp[1][0], parse("-p2_1")));

  auto ext = hamiltonian_field(cur({"x1"}, {"x2", "0"}), chart);
  CHECK(symbolically_equal(ext.vpext, parse("-p1_1")));
}

TEST_CASE("representation residual examples") {
  std::mt19937_64 rng(11);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  Current a = random_poly_current(chart, 2, rng).to_current("a");
  Current b = random_poly_current(chart, 2, rng).to_current("b");
  HamiltonianSection h(chart, Polynomial::random(names, names, 2, rng).to_expression());
  auto pts = random_bindings(names, 100, -1, 1, rng);
  CHECK(representation_residual(a, a, h, pts) == 0.0);
  CHECK(representation_residual(a, b, h, pts) <= 1e-9);
  CHECK(max_abs_over(representation_defect(a, b, h), pts) <= 1e-9);

  HamiltonianSection hc(chart, 2.5);
  Current ab = current_bracket(a, b, chart);
  auto coeff = current_coefficients(ab, chart);
  for (int k = 0; k < 10; ++k) {
    // With H constant, {{a,b},h} is the divergence of the coefficients.
    double div = test::fd(coeff[0], "x1", pts[k]) + test::fd(coeff[1], "x2", pts[k]);
    CHECK(std::fabs(eval(bracket_affine(ab, hc), pts[k]) - div) <= 1e-8);
  }
  CHECK(representation_residual(a, b, hc, pts) <= 1e-9);

  Chart c1(1, 1);
  HamiltonianSection h1(c1, parse("p1_1^2/2 + x1*u1^3"));
  auto pts1 = random_bindings(c1.all_names(), 50, -1, 1, rng);
  CHECK(representation_residual(parse("u1^2*p1_1"), parse("x1*p1_1^2 + u1"), h1, pts1) <=
        1e-12);
}
