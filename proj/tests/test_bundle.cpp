#include <doctest.h>

#include <algorithm>

#include "hdw/bundle.hpp"
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

}  // namespace

TEST_CASE("chart names") {
  Chart c(2, 3);
  CHECK(c.x(0) == "x1");
  CHECK(c.u(2) == "u3");
  CHECK(c.p(1, 2) == "p2_3");
  CHECK(c.momentum_names().size() == 6);
  CHECK(c.momentum_names()[1] == "p1_2");
  auto all = c.all_names();
  CHECK(all.size() == 2 + 3 + 6);
  CHECK(all.front() == "x1");
  CHECK(all.back() == "p2_3");
  CHECK(c.is_momentum("p1_1"));
  CHECK_FALSE(c.is_momentum("p3_1"));
  CHECK_FALSE(c.contains(kExtendedMomentum));
  CHECK_THROWS_AS(Chart(0, 1), Error);
  CHECK_THROWS_AS(Chart(1, 0), Error);
}

TEST_CASE("Hamiltonian sections stay inside the chart") {
  Chart c(1, 1);
  CHECK_NOTHROW(HamiltonianSection(c, parse("p1_1^2/2 + x1*u1")));
  CHECK_THROWS_AS(HamiltonianSection(c, parse("u2")), Error);
  CHECK_THROWS_AS(HamiltonianSection(c, parse("pext")), Error);
}

TEST_CASE("validate_current examples") {
  Chart c(2, 1);
  CHECK(validate_current(cur({"1"}, {"0", "0"}), c).valid);
  auto bad = validate_current(cur({"p1_1"}, {"0", "0"}), c);
  CHECK_FALSE(bad.valid);
  REQUIRE(bad.offending.size() == 1);
  CHECK(bad.offending[0] == "p1_1");
  CHECK(validate_current(cur({"sin(u1)"}, {"x2", "x1"}), c).valid);
  CHECK_FALSE(validate_current(cur({"1"}, {"0"}), c).valid);
  CHECK_FALSE(validate_current(cur({"u7"}, {"0", "0"}), c).valid);
  CHECK_THROWS_AS(require_valid(cur({"p2_1"}, {"0", "0"}), c), Error);
}

TEST_CASE("current_coefficients examples") {
  auto a = current_coefficients(cur({"u1"}, {"0"}), Chart(1, 1));
  REQUIRE(a.size() == 1);
  CHECK(symbolically_equal(a[0], parse("u1*p1_1")));

  Chart c(2, 2);
  auto b = current_coefficients(cur({"0", "0"}, {"x1*u2", "sin(u1)"}), c);
  CHECK(symbolically_equal(b[0], parse("x1*u2")));
  CHECK(symbolically_equal(b[1], parse("sin(u1)")));

  auto d = current_coefficients(cur({"1"}, {"0", "0"}), Chart(2, 1));
  CHECK(d[0].str() == "p1_1");
  CHECK(d[1].str() == "p2_1");
}

TEST_CASE("d_current examples") {
  Chart c21(2, 1);
  auto z = d_current(cur({"0"}, {"3", "-1"}), c21);
  CHECK(z.c0.is_zero());
  for (const auto& row : z.cu) {
    for (const auto& e : row) CHECK(e.is_zero());
  }
  CHECK(z.cp[0].is_zero());

  auto one = d_current(cur({"1"}, {"0"}), Chart(1, 1));
  CHECK(one.c0.is_zero());
  CHECK(one.cu[0][0].is_zero());
  CHECK(one.cp[0].str() == "1");

  auto lin = d_current(cur({"u1"}, {"0", "0"}), c21);
  CHECK(lin.c0.is_zero());
  CHECK(lin.cu[0][0].str() == "p1_1");
  CHECK(lin.cu[0][1].str() == "p2_1");
  CHECK(lin.cp[0].str() == "u1");
}

TEST_CASE("d_current agrees with partial derivatives of the coefficients") {
  // c0 = sum_i d/dx^i alpha^{0i}, cu[b][i] = d/du^b alpha^{0i}.
  std::mt19937_64 rng(3);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  for (int t = 0; t < 5; ++t) {
    Current c = random_poly_current(chart, 2, rng).to_current("c");
    auto d = d_current(c, chart);
    auto a = current_coefficients(c, chart);
    Expression div = diff(a[0], "x1") + diff(a[1], "x2");
    CHECK(symbolically_equal(d.c0, div));
    for (int b = 0; b < 2; ++b) {
      for (int i = 0; i < 2; ++i) {
        CHECK(symbolically_equal(d.cu[b][i], diff(a[i], chart.u(b))));
      }
      CHECK(symbolically_equal(d.cp[b], c.Y[b]));
    }
  }
}

TEST_CASE("extended_density examples") {
  Chart c(1, 1);
  CHECK(extended_density(HamiltonianSection(c, 0.0)).str() == "pext");
  Expression e = extended_density(HamiltonianSection(c, parse("u1^2/2")));
  CHECK(symbolically_equal(e, parse("pext + u1^2/2")));
  CHECK(diff(e, kExtendedMomentum).str() == "1");
  Expression f = extended_density(
      HamiltonianSection(Chart(2, 2), parse("p1_1*p2_2*sin(u1) + x2")));
  CHECK(diff(f, kExtendedMomentum).str() == "1");
}

TEST_CASE("coefficients of valid currents have the affine pattern") {
  std::mt19937_64 rng(4);
  for (int m = 2; m <= 3; ++m) {
    Chart chart(m, 2);
    Current c = random_poly_current(chart, 2, rng).to_current("c");
    auto a = current_coefficients(c, chart);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        for (int b = 0; b < 2; ++b) {
          Expression d = diff(a[i], chart.p(j, b));
          if (i != j) {
            CHECK(d.is_zero());
          } else {
            CHECK(symbolically_equal(d, diff(a[0], chart.p(0, b))));
          }
        }
      }
    }
  }
}

TEST_CASE("d_current is linear") {
  std::mt19937_64 rng(5);
  Chart chart(2, 2);
  const auto names = chart.all_names();
  Current a = random_poly_current(chart, 2, rng).to_current("a");
  Current b = random_poly_current(chart, 2, rng).to_current("b");
  auto dab = d_current(a + b, chart);
  auto da = d_current(a, chart);
  auto db = d_current(b, chart);
  auto pts = random_bindings(names, 50, -1, 1, rng);
  for (const auto& p : pts) {
    CHECK(std::fabs(eval(dab.c0, p) - eval(da.c0, p) - eval(db.c0, p)) <= 1e-12);
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        CHECK(std::fabs(eval(dab.cu[k][i], p) - eval(da.cu[k][i], p) -
                        eval(db.cu[k][i], p)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("coefficient round trip recovers the current") {
  std::mt19937_64 rng(6);
  for (int m = 2; m <= 3; ++m) {
    Chart chart(m, 2);
    Current c = random_poly_current(chart, 2, rng).to_current("c");
    Current back = current_from_coefficients(current_coefficients(c, chart), chart);
    for (int a = 0; a < 2; ++a) CHECK(symbolically_equal(back.Y[a], c.Y[a]));
    for (int i = 0; i < m; ++i) CHECK(symbolically_equal(back.beta[i], c.beta[i]));
  }
  Chart chart(2, 1);
  CHECK_THROWS_AS(current_from_coefficients({parse("p1_1"), parse("0")}, chart), Error);
}
