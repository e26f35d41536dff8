#pragma once

// Symbolic expressions over named real variables.
//
// Every coordinate function of the library (Hamiltonians, current
// coefficients, densities) is an Expression. Trees are immutable and share
// structure through shared_ptr, so copies are cheap and concurrent reads are
// safe.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             std::string found);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string found_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Sin,
  Cos,
  Exp,
  Ln,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

bool is_function(Op op);
bool is_binary(Op op);

struct Node;

class Expression {
 public:
  // The zero constant.
  Expression();
  Expression(double value);  // NOLINT(google-explicit-constructor)

  static Expression constant(double value);
  static Expression variable(std::string name);

  // Raw constructors: build exactly the requested node, no folding.
  static Expression unary(Op op, Expression arg);
  static Expression binary(Op op, Expression lhs, Expression rhs);
  static Expression power(Expression base, int exponent);

  Op op() const;
  double value() const;             // Const only
  const std::string& name() const;  // Var only
  int exponent() const;             // Pow only
  Expression arg() const;  // unary ops and Pow base
  Expression lhs() const;
  Expression rhs() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool is_zero() const { return is_constant(0.0); }

  std::set<std::string> variables() const;
  bool depends_on(std::string_view name) const;
  std::size_t size() const;

  std::string str() const;

  friend bool operator==(const Expression& a, const Expression& b);
  friend bool operator!=(const Expression& a, const Expression& b) {
    return !(a == b);
  }

  const std::shared_ptr<const Node>& node() const { return node_; }
  static Expression from_node(std::shared_ptr<const Node> node);

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  int exponent = 0;
  std::string name;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

// Total structural order; used to canonicalise sums and products.
int compare(const Expression& a, const Expression& b);

// Arithmetic with light local folding (0+x, 1*x, 0*x, constant folding,
// double negation). Use Expression::binary for exact trees.
Expression operator-(const Expression& a);
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression pow(const Expression& base, int exponent);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression ln(const Expression& a);
Expression sqrt(const Expression& a);

// Sum of a list; empty list gives 0.
Expression sum(const std::vector<Expression>& terms);

class Binding {
 public:
  Binding() = default;
  Binding(std::initializer_list<std::pair<const std::string, double>> init)
      : values_(init) {}

  void set(const std::string& name, double value) { values_[name] = value; }
  double get(const std::string& name) const;
  bool contains(const std::string& name) const {
    return values_.count(name) != 0;
  }
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' intlit)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
//   func   := sin | cos | exp | ln | sqrt
// intlit may carry a sign, optionally parenthesised: x^-1, x^(-1).
Expression parse(std::string_view text);

double eval(const Expression& e, const Binding& b);

// Exact derivative, simplified.
Expression diff(const Expression& e, std::string_view var);

// Canonical form: flattened sums and products with sorted operands, like
// terms and like factors merged, constants folded, identities removed.
// Products of sums are not expanded.
Expression simplify(const Expression& e);

// True when simplify(a - b) is the zero constant.
bool symbolically_equal(const Expression& a, const Expression& b);

// Applies an elementary function with the library's domain rules.
double apply_function(Op op, double x);
double integer_power(double base, int exponent);

}  // namespace hdw
