#include <doctest.h>

#include "hdw/compiled.hpp"
#include "hdw/expr.hpp"
#include "support.hpp"

using namespace hdw;

TEST_CASE("parse builds the expected trees") {
  Expression e = parse("p1_1^2/2");
  CHECK(e.op() == Op::Div);
  CHECK(e.lhs().op() == Op::Pow);
  CHECK(e.lhs().exponent() == 2);
  CHECK(e.lhs().arg().name() == "p1_1");
  CHECK(e.rhs().value() == 2.0);

  Expression m = parse("sin(x1)*u1");
  CHECK(m.op() == Op::Mul);
  CHECK(m.lhs().op() == Op::Sin);
  CHECK(m.rhs().name() == "u1");
}

TEST_CASE("parse reports offset and expected tokens") {
  try {
    parse("u1 + * 2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK(e.found() == "'*'");
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("(u1"), ParseError);
  CHECK_THROWS_AS(parse("u1^1.5"), ParseError);
  CHECK_THROWS_AS(parse("foo(u1)"), ParseError);
  CHECK_THROWS_AS(parse("u1 u2"), ParseError);
}

TEST_CASE("precedence and association") {
  CHECK(eval(parse("8/4/2"), {}) == 1.0);
  CHECK(eval(parse("2-3-4"), {}) == -5.0);
  CHECK(eval(parse("-x1^2"), {{"x1", 3}}) == -9.0);
  CHECK(eval(parse("2*x1^-1"), {{"x1", 4}}) == 0.5);
  CHECK(eval(parse("x1^(-2)"), {{"x1", 2}}) == 0.25);
  CHECK(eval(parse("  1 +\t2 * 3 "), {}) == 7.0);
  CHECK(eval(parse("1.5e2 + .5"), {}) == 150.5);
}

TEST_CASE("eval examples") {
  CHECK(eval(parse("x1^2"), {{"x1", 3}}) == 9.0);
  CHECK(eval(parse("sin(x1)"), {{"x1", 0}}) == 0.0);
  CHECK(eval(parse("u1*p1_1"), {{"u1", 2}, {"p1_1", 5}}) == 10.0);
}

TEST_CASE("eval errors") {
  CHECK_THROWS_AS(eval(parse("u1 + u2"), {{"u1", 1}}), UnboundVariable);
  CHECK_THROWS_AS(eval(parse("ln(x1)"), {{"x1", 0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("ln(x1)"), {{"x1", -1}}), DomainError);
  CHECK_THROWS_AS(eval(parse("sqrt(x1)"), {{"x1", -1}}), DomainError);
  CHECK_THROWS_AS(eval(parse("x1^0"), {{"x1", 0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("x1^-1"), {{"x1", 0}}), DomainError);
  CHECK(eval(parse("sqrt(x1)"), {{"x1", 0}}) == 0.0);
}

TEST_CASE("diff examples") {
  CHECK(diff(parse("u1^2"), "u1").str() == "2*u1");
  CHECK(diff(parse("u1"), "x1").str() == "0");
  Expression d = diff(parse("sin(u1)*p1_1"), "p1_1");
  CHECK(d.str() == "sin(u1)");
  std::mt19937_64 rng(7);
  Expression f = parse("sin(u1)*p1_1");
  for (int k = 0; k < 10; ++k) {
    Binding b = test::random_binding({"u1", "p1_1"}, rng, -2, 2);
    CHECK(std::fabs(eval(d, b) - test::fd(f, "p1_1", b)) <= 1e-8);
  }
}

TEST_CASE("diff rules against finite differences") {
  const char* cases[] = {"exp(2*u1)*cos(u1)", "ln(1 + u1^2)", "sqrt(3 + sin(u1))",
                         "u1/(1 + u1^2)",     "(u1 - 2)^-3",  "x1*u1^5 - u1"};
  Binding b{{"u1", 0.37}, {"x1", 1.2}};
  for (const char* c : cases) {
    Expression e = parse(c);
    CAPTURE(c);
    CHECK(test::rel_err(eval(diff(e, "u1"), b), test::fd(e, "u1", b)) <= 1e-8);
  }
}

TEST_CASE("simplify examples") {
  CHECK(simplify(parse("u1*0 + x1")).str() == "x1");
  CHECK(simplify(parse("2*3")).str() == "6");
  CHECK(simplify(parse("(u1+0)^1")).str() == "u1");
  CHECK(simplify(parse("u1 - u1")).is_zero());
  CHECK(simplify(parse("u1*u2 - u2*u1")).is_zero());
  CHECK(symbolically_equal(parse("(a+b)*c"), parse("c*(b+a)")));
  CHECK_FALSE(symbolically_equal(parse("a*b"), parse("a+b")));
}

TEST_CASE("print then parse evaluates equal") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vars = {"x1", "u1", "p1_1"};
  for (int k = 0; k < 100; ++k) {
    Expression e = test::random_expr(4, vars, rng);
    Expression back = parse(e.str());
    Binding b = test::random_binding(vars, rng, -2, 2);
    CAPTURE(e.str());
    CHECK(test::rel_err(eval(back, b), eval(e, b)) <= 1e-12);
  }
}

TEST_CASE("simplify preserves values") {
  std::mt19937_64 rng(12);
  const std::vector<std::string> vars = {"x1", "u1", "p1_1"};
  for (int k = 0; k < 200; ++k) {
    Expression e = test::random_expr(4, vars, rng);
    Expression s = simplify(e);
    Binding b = test::random_binding(vars, rng, -2, 2);
    CAPTURE(e.str());
    CHECK(test::rel_err(eval(s, b), eval(e, b)) <= 1e-12);
  }
}

TEST_CASE("symbolic derivatives match finite differences") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> vars = {"x1", "u1", "p1_1"};
  for (int k = 0; k < 200; ++k) {
    Expression e = test::random_expr(3, vars, rng);
    const std::string& v = vars[k % 3];
    Binding b = test::random_binding(vars, rng, -2, 2);
    double d = eval(diff(e, v), b);
    CAPTURE(e.str());
    CHECK(std::fabs(d - test::fd(e, v, b)) <= 1e-5 * (1 + std::fabs(d)));
  }
}

TEST_CASE("compiled expressions agree with the tree evaluator") {
  std::mt19937_64 rng(14);
  const std::vector<std::string> vars = {"x1", "u1", "p1_1"};
  for (int k = 0; k < 100; ++k) {
    Expression e = test::random_expr(4, vars, rng);
    CompiledExpression c(e, vars);
    Binding b = test::random_binding(vars, rng, -2, 2);
    std::vector<double> x = {b.get("x1"), b.get("u1"), b.get("p1_1")};
    CHECK(c(x) == eval(e, b));
  }
  CHECK_THROWS_AS(CompiledExpression(parse("u2"), vars), UnboundVariable);
}
