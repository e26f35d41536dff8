#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hdw/expr.hpp"

namespace hdw::test {

// Central finite difference of e in v at b.
inline double fd(const Expression& e, const std::string& v, const Binding& b,
                 double h = 1e-6) {
  Binding bp = b, bm = b;
  bp.set(v, b.get(v) + h);
  bm.set(v, b.get(v) - h);
  return (eval(e, bp) - eval(e, bm)) / (2 * h);
}

inline Binding random_binding(const std::vector<std::string>& names,
                              std::mt19937_64& rng, double lo = -1.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Binding b;
  for (const auto& n : names) b.set(n, d(rng));
  return b;
}

// Random expression over `vars` that stays finite on [-2, 2]^k.
inline Expression random_expr(int depth, const std::vector<std::string>& vars,
                              std::mt19937_64& rng) {
  std::uniform_int_distribution<int> op(0, 9);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  std::uniform_real_distribution<double> cst(-3.0, 3.0);
  if (depth == 0) {
    if (op(rng) < 7) return Expression::variable(vars[pick(rng)]);
    return Expression(std::round(cst(rng) * 4) / 4);
  }
  auto sub = [&] { return random_expr(depth - 1, vars, rng); };
  auto pos = [&] { return Expression::binary(Op::Add, Expression(2.0),
                                             Expression::power(sub(), 2)); };
  switch (op(rng)) {
    case 0: return Expression::binary(Op::Add, sub(), sub());
    case 1: return Expression::binary(Op::Sub, sub(), sub());
    case 2: return Expression::binary(Op::Mul, sub(), sub());
    case 3: return Expression::binary(Op::Div, sub(), pos());
    case 4: return Expression::power(sub(), 2);
    case 5: return Expression::unary(Op::Neg, sub());
    case 6: return Expression::unary(Op::Sin, sub());
    case 7: return Expression::unary(Op::Cos, sub());
    case 8: return Expression::unary(Op::Ln, pos());
    default: return Expression::unary(Op::Sqrt, pos());
  }
}

inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace hdw::test
