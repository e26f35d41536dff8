#include "hdw/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace hdw {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> zero = make_node(Node{});
  return zero;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    default: return "?";
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       std::string found)
    : Error("syntax error at offset " + std::to_string(offset) +
            ": expected one of {" + join(expected) + "} but found " + found),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

UnboundVariable::UnboundVariable(const std::string& name)
    : Error("unbound variable '" + name + "'"), name_(name) {}

bool is_function(Op op) {
  return op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Ln ||
         op == Op::Sqrt;
}

bool is_binary(Op op) {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

// ---------------------------------------------------------------------------
// Construction and access

Expression::Expression() : node_(zero_node()) {}

Expression::Expression(double value) : Expression(constant(value)) {}

Expression Expression::from_node(std::shared_ptr<const Node> node) {
  Expression e;
  e.node_ = std::move(node);
  return e;
}

Expression Expression::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expression();
  Node n;
  n.op = Op::Const;
  n.value = value == 0.0 ? 0.0 : value;
  if (n.value == 0.0) return Expression();
  return from_node(make_node(std::move(n)));
}

Expression Expression::variable(std::string name) {
  Node n;
  n.op = Op::Var;
  n.name = std::move(name);
  return from_node(make_node(std::move(n)));
}

Expression Expression::unary(Op op, Expression arg) {
  if (op != Op::Neg && !is_function(op)) {
    throw Error("Expression::unary: not a unary operator");
  }
  Node n;
  n.op = op;
  n.a = arg.node_;
  return from_node(make_node(std::move(n)));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  if (!is_binary(op)) throw Error("Expression::binary: not a binary operator");
  Node n;
  n.op = op;
  n.a = lhs.node_;
  n.b = rhs.node_;
  return from_node(make_node(std::move(n)));
}

Expression Expression::power(Expression base, int exponent) {
  Node n;
  n.op = Op::Pow;
  n.exponent = exponent;
  n.a = base.node_;
  return from_node(make_node(std::move(n)));
}

Op Expression::op() const { return node_->op; }
double Expression::value() const { return node_->value; }
const std::string& Expression::name() const { return node_->name; }
int Expression::exponent() const { return node_->exponent; }
Expression Expression::arg() const { return from_node(node_->a); }
Expression Expression::lhs() const { return from_node(node_->a); }
Expression Expression::rhs() const { return from_node(node_->b); }

namespace {

void collect_variables(const Node& n, std::set<std::string>& out) {
  if (n.op == Op::Var) out.insert(n.name);
  if (n.a) collect_variables(*n.a, out);
  if (n.b) collect_variables(*n.b, out);
}

bool node_depends_on(const Node& n, std::string_view name) {
  if (n.op == Op::Var) return n.name == name;
  if (n.a && node_depends_on(*n.a, name)) return true;
  if (n.b && node_depends_on(*n.b, name)) return true;
  return false;
}

std::size_t node_size(const Node& n) {
  std::size_t s = 1;
  if (n.a) s += node_size(*n.a);
  if (n.b) s += node_size(*n.b);
  return s;
}

int compare_nodes(const Node* a, const Node* b) {
  if (a == b) return 0;
  if (a->op != b->op) return a->op < b->op ? -1 : 1;
  switch (a->op) {
    case Op::Const:
      if (a->value == b->value) return 0;
      return a->value < b->value ? -1 : 1;
    case Op::Var:
      return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Op::Pow: {
      int c = compare_nodes(a->a.get(), b->a.get());
      if (c) return c;
      if (a->exponent == b->exponent) return 0;
      return a->exponent < b->exponent ? -1 : 1;
    }
    default: {
      int c = compare_nodes(a->a.get(), b->a.get());
      if (c || !a->b) return c;
      return compare_nodes(a->b.get(), b->b.get());
    }
  }
}

}  // namespace

std::set<std::string> Expression::variables() const {
  std::set<std::string> out;
  collect_variables(*node_, out);
  return out;
}

bool Expression::depends_on(std::string_view name) const {
  return node_depends_on(*node_, name);
}

std::size_t Expression::size() const { return node_size(*node_); }

int compare(const Expression& a, const Expression& b) {
  return compare_nodes(a.node().get(), b.node().get());
}

bool operator==(const Expression& a, const Expression& b) {
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Numerics shared by tree and compiled evaluation

double integer_power(double base, int exponent) {
  if (base == 0.0 && exponent <= 0) {
    throw DomainError("0^" + std::to_string(exponent) + " is undefined");
  }
  unsigned k = exponent < 0 ? static_cast<unsigned>(-(long long)exponent)
                            : static_cast<unsigned>(exponent);
  double result = 1.0;
  double b = base;
  // Plain repeated multiplication for small exponents keeps x^2 == x*x.
  if (k <= 16) {
    for (unsigned i = 0; i < k; ++i) result *= b;
  } else {
    while (k) {
      if (k & 1U) result *= b;
      b *= b;
      k >>= 1U;
    }
  }
  return exponent < 0 ? 1.0 / result : result;
}

double apply_function(Op op, double x) {
  switch (op) {
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Exp: return std::exp(x);
    case Op::Ln:
      if (!(x > 0.0)) {
        throw DomainError("ln of non-positive value " + format_number(x));
      }
      return std::log(x);
    case Op::Sqrt:
      if (x < 0.0) {
        throw DomainError("sqrt of negative value " + format_number(x));
      }
      return std::sqrt(x);
    case Op::Neg: return -x;
    default: throw Error("apply_function: not a unary operator");
  }
}

// ---------------------------------------------------------------------------
// Folding arithmetic

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression::constant(-a.value());
  if (a.op() == Op::Neg) return a.arg();
  return Expression::unary(Op::Neg, a);
}

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expression::constant(a.value() + b.value());
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expression::binary(Op::Add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expression::constant(a.value() - b.value());
  }
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return Expression::binary(Op::Sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expression::constant(a.value() * b.value());
  }
  if (a.is_zero() || b.is_zero()) return Expression();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expression::binary(Op::Mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  if (b.is_zero()) throw DomainError("division by the constant zero");
  if (a.is_zero()) return Expression();
  if (b.is_constant(1.0)) return a;
  if (a.is_constant() && b.is_constant()) {
    return Expression::constant(a.value() / b.value());
  }
  return Expression::binary(Op::Div, a, b);
}

Expression pow(const Expression& base, int exponent) {
  if (exponent == 1) return base;
  if (base.is_constant()) {
    return Expression::constant(integer_power(base.value(), exponent));
  }
  if (exponent == 0) return Expression::constant(1.0);
  return Expression::power(base, exponent);
}

namespace {

Expression fold_function(Op op, const Expression& a) {
  if (a.is_constant()) {
    try {
      return Expression::constant(apply_function(op, a.value()));
    } catch (const DomainError&) {
      // leave undefined constants symbolic
    }
  }
  return Expression::unary(op, a);
}

}  // namespace

Expression sin(const Expression& a) { return fold_function(Op::Sin, a); }
Expression cos(const Expression& a) { return fold_function(Op::Cos, a); }
Expression exp(const Expression& a) { return fold_function(Op::Exp, a); }
Expression ln(const Expression& a) { return fold_function(Op::Ln, a); }
Expression sqrt(const Expression& a) { return fold_function(Op::Sqrt, a); }

Expression sum(const std::vector<Expression>& terms) {
  Expression acc;
  for (const auto& t : terms) acc = acc + t;
  return acc;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expression& e) {
  switch (e.op()) {
    case Op::Const: return e.value() < 0 ? 3 : 5;
    case Op::Var: return 5;
    case Op::Neg: return 3;
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Pow: return 4;
    default: return 5;  // functions
  }
}

void print(const Expression& e, std::string& out);

void print_wrapped(const Expression& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expression& e, std::string& out) {
  switch (e.op()) {
    case Op::Const: out += format_number(e.value()); return;
    case Op::Var: out += e.name(); return;
    case Op::Neg:
      out += '-';
      print_wrapped(e.arg(), precedence(e.arg()) < 4, out);
      return;
    case Op::Pow:
      print_wrapped(e.arg(), precedence(e.arg()) < 5, out);
      out += '^';
      if (e.exponent() < 0) {
        out += "(" + std::to_string(e.exponent()) + ")";
      } else {
        out += std::to_string(e.exponent());
      }
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    default:
      out += function_name(e.op());
      out += '(';
      print(e.arg(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expression::str() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse_all() {
    skip_ws();
    Expression e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    }
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::string found() const {
    if (pos_ >= text_.size()) return "end of input";
    return std::string("'") + text_[pos_] + "'";
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(pos_, std::move(expected), found());
  }

  static std::vector<std::string> operand_tokens() {
    return {"number", "identifier", "'('", "'-'"};
  }

  Expression parse_expr() {
    Expression acc = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        Expression rhs = parse_term();
        acc = Expression::binary(c == '+' ? Op::Add : Op::Sub, acc, rhs);
      } else {
        return acc;
      }
    }
  }

  Expression parse_term() {
    Expression acc = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        Expression rhs = parse_factor();
        acc = Expression::binary(c == '*' ? Op::Mul : Op::Div, acc, rhs);
      } else {
        return acc;
      }
    }
  }

  Expression parse_factor() {
    if (peek() == '-') {
      ++pos_;
      return Expression::unary(Op::Neg, parse_factor());
    }
    Expression base = parse_base();
    if (peek() == '^') {
      ++pos_;
      return Expression::power(base, parse_exponent());
    }
    return base;
  }

  int parse_exponent() {
    bool paren = false;
    if (peek() == '(') {
      paren = true;
      ++pos_;
    }
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      ++pos_;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) {
      fail(paren || negative ? std::vector<std::string>{"integer"}
                             : std::vector<std::string>{"integer", "'('",
                                                        "'-'"});
    }
    if (pos_ < text_.size() &&
        (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail({"integer exponent"});
    }
    long long k = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (res.ec != std::errc() || k > 1000000) {
      pos_ = start;
      fail({"integer of moderate size"});
    }
    if (paren) {
      if (peek() != ')') fail({"')'"});
      ++pos_;
    }
    return static_cast<int>(negative ? -k : k);
  }

  Expression parse_base() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expression e = parse_expr();
      if (peek() != ')') fail({"')'", "'+'", "'-'", "'*'", "'/'"});
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      std::string ident(text_.substr(start, pos_ - start));
      std::size_t after = pos_;
      if (peek() == '(') {
        Op op = Op::Const;
        if (ident == "sin") op = Op::Sin;
        if (ident == "cos") op = Op::Cos;
        if (ident == "exp") op = Op::Exp;
        if (ident == "ln") op = Op::Ln;
        if (ident == "sqrt") op = Op::Sqrt;
        if (op == Op::Const) {
          pos_ = start;
          throw ParseError(start, {"sin", "cos", "exp", "ln", "sqrt"},
                           "unknown function '" + ident + "'");
        }
        ++pos_;
        Expression arg = parse_expr();
        if (peek() != ')') fail({"')'", "'+'", "'-'", "'*'", "'/'"});
        ++pos_;
        return Expression::unary(op, arg);
      }
      pos_ = after;
      return Expression::variable(std::move(ident));
    }
    fail(operand_tokens());
  }

  Expression parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail({"digit"});
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (digits() == 0) fail({"exponent digits"});
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    return Expression::constant(v);
  }
};

}  // namespace

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

double Binding::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw UnboundVariable(name);
  return it->second;
}

namespace {

double eval_node(const Node& n, const Binding& b) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return b.get(n.name);
    case Op::Add: return eval_node(*n.a, b) + eval_node(*n.b, b);
    case Op::Sub: return eval_node(*n.a, b) - eval_node(*n.b, b);
    case Op::Mul: return eval_node(*n.a, b) * eval_node(*n.b, b);
    case Op::Div: return eval_node(*n.a, b) / eval_node(*n.b, b);
    case Op::Pow: return integer_power(eval_node(*n.a, b), n.exponent);
    default: return apply_function(n.op, eval_node(*n.a, b));
  }
}

}  // namespace

double eval(const Expression& e, const Binding& b) {
  return eval_node(*e.node(), b);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expression raw_diff(const Expression& e, std::string_view var) {
  switch (e.op()) {
    case Op::Const: return Expression();
    case Op::Var: return Expression(e.name() == var ? 1.0 : 0.0);
    case Op::Neg: return -raw_diff(e.arg(), var);
    case Op::Add: return raw_diff(e.lhs(), var) + raw_diff(e.rhs(), var);
    case Op::Sub: return raw_diff(e.lhs(), var) - raw_diff(e.rhs(), var);
    case Op::Mul:
      return raw_diff(e.lhs(), var) * e.rhs() +
             e.lhs() * raw_diff(e.rhs(), var);
    case Op::Div: {
      Expression da = raw_diff(e.lhs(), var);
      Expression db = raw_diff(e.rhs(), var);
      if (db.is_zero()) return da / e.rhs();
      return (da * e.rhs() - e.lhs() * db) / pow(e.rhs(), 2);
    }
    case Op::Pow: {
      Expression da = raw_diff(e.arg(), var);
      if (da.is_zero()) return Expression();
      int k = e.exponent();
      return Expression(static_cast<double>(k)) * pow(e.arg(), k - 1) * da;
    }
    default: break;
  }
  Expression a = e.arg();
  Expression da = raw_diff(a, var);
  if (da.is_zero()) return Expression();
  switch (e.op()) {
    case Op::Sin: return cos(a) * da;
    case Op::Cos: return -(sin(a) * da);
    case Op::Exp: return e * da;
    case Op::Ln: return da / a;
    case Op::Sqrt: return da / (Expression(2.0) * e);
    default: throw Error("diff: unexpected node");
  }
}

}  // namespace

Expression diff(const Expression& e, std::string_view var) {
  return simplify(raw_diff(e, var));
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

struct Term {
  double coef;
  Expression mono;  // constant 1 for the pure-constant term
};

struct Factor {
  Expression base;
  int exponent;
};

const Expression& one() {
  static const Expression e = Expression::constant(1.0);
  return e;
}

std::pair<double, Expression> split_coefficient(const Expression& e) {
  if (e.is_constant()) return {e.value(), one()};
  if (e.op() == Op::Neg) {
    auto [c, m] = split_coefficient(e.arg());
    return {-c, m};
  }
  if (e.op() == Op::Mul && e.lhs().is_constant()) {
    return {e.lhs().value(), e.rhs()};
  }
  return {1.0, e};
}

void collect_terms(const Expression& e, double sign, std::vector<Term>& out) {
  switch (e.op()) {
    case Op::Add:
      collect_terms(e.lhs(), sign, out);
      collect_terms(e.rhs(), sign, out);
      return;
    case Op::Sub:
      collect_terms(e.lhs(), sign, out);
      collect_terms(e.rhs(), -sign, out);
      return;
    case Op::Neg: collect_terms(e.arg(), -sign, out); return;
    default: {
      auto [c, m] = split_coefficient(e);
      out.push_back({sign * c, m});
    }
  }
}

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return compare(a.mono, b.mono) < 0;
  });
  std::vector<Term> merged;
  for (auto& t : terms) {
    if (!merged.empty() && compare(merged.back().mono, t.mono) == 0) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::vector<Term> out;
  for (auto& t : merged) {
    if (t.coef != 0.0) out.push_back(std::move(t));
  }
  return out;
}

Expression make_term(double c, const Expression& mono) {
  if (mono.is_constant(1.0)) return Expression::constant(c);
  if (c == 1.0) return mono;
  if (c == -1.0) return Expression::unary(Op::Neg, mono);
  return Expression::binary(Op::Mul, Expression::constant(c), mono);
}

Expression build_sum(const std::vector<Term>& terms) {
  if (terms.empty()) return Expression();
  Expression acc = make_term(terms[0].coef, terms[0].mono);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    const Term& t = terms[i];
    if (t.coef < 0) {
      acc = Expression::binary(Op::Sub, acc, make_term(-t.coef, t.mono));
    } else {
      acc = Expression::binary(Op::Add, acc, make_term(t.coef, t.mono));
    }
  }
  return acc;
}

void collect_factors(const Expression& e, int power, double& coef,
                     std::vector<Factor>& out) {
  switch (e.op()) {
    case Op::Const:
      if (power < 0 && e.value() == 0.0) {
        throw DomainError("division by the constant zero");
      }
      coef *= integer_power(e.value(), power);
      return;
    case Op::Mul:
      collect_factors(e.lhs(), power, coef, out);
      collect_factors(e.rhs(), power, coef, out);
      return;
    case Op::Div:
      collect_factors(e.lhs(), power, coef, out);
      collect_factors(e.rhs(), -power, coef, out);
      return;
    case Op::Neg:
      if (power % 2 != 0) coef = -coef;
      collect_factors(e.arg(), power, coef, out);
      return;
    case Op::Pow:
      collect_factors(e.arg(), power * e.exponent(), coef, out);
      return;
    case Op::Add:
    case Op::Sub: {
      // Fix the sign of a sum factor so that its leading term is positive.
      std::vector<Term> terms;
      collect_terms(e, 1.0, terms);
      if (!terms.empty() && terms.front().coef < 0) {
        for (auto& t : terms) t.coef = -t.coef;
        if (power % 2 != 0) coef = -coef;
        out.push_back({build_sum(terms), power});
      } else {
        out.push_back({e, power});
      }
      return;
    }
    default: out.push_back({e, power});
  }
}

Expression build_power(const Expression& base, int k) {
  return k == 1 ? base : Expression::power(base, k);
}

Expression build_product(double coef, std::vector<Factor> factors) {
  if (coef == 0.0) return Expression();
  std::stable_sort(factors.begin(), factors.end(),
                   [](const Factor& a, const Factor& b) {
                     return compare(a.base, b.base) < 0;
                   });
  std::vector<Factor> merged;
  for (auto& f : factors) {
    if (!merged.empty() && compare(merged.back().base, f.base) == 0) {
      merged.back().exponent += f.exponent;
    } else {
      merged.push_back(std::move(f));
    }
  }
  Expression num;
  Expression den;
  bool has_num = false;
  bool has_den = false;
  for (const auto& f : merged) {
    if (f.exponent > 0) {
      Expression p = build_power(f.base, f.exponent);
      num = has_num ? Expression::binary(Op::Mul, num, p) : p;
      has_num = true;
    } else if (f.exponent < 0) {
      Expression p = build_power(f.base, -f.exponent);
      den = has_den ? Expression::binary(Op::Mul, den, p) : p;
      has_den = true;
    }
  }
  if (!has_num && !has_den) return Expression::constant(coef);
  Expression mono;
  if (has_den) {
    mono = Expression::binary(Op::Div, has_num ? num : one(), den);
  } else {
    mono = num;
  }
  return make_term(coef, mono);
}

Expression simplify_node(const Expression& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Var: return e;
    case Op::Neg:
    case Op::Add:
    case Op::Sub: {
      Expression s =
          e.op() == Op::Neg
              ? Expression::unary(Op::Neg, simplify_node(e.arg()))
              : Expression::binary(e.op(), simplify_node(e.lhs()),
                                   simplify_node(e.rhs()));
      std::vector<Term> terms;
      collect_terms(s, 1.0, terms);
      return build_sum(merge_terms(std::move(terms)));
    }
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      Expression s =
          e.op() == Op::Pow
              ? Expression::power(simplify_node(e.arg()), e.exponent())
              : Expression::binary(e.op(), simplify_node(e.lhs()),
                                   simplify_node(e.rhs()));
      double coef = 1.0;
      std::vector<Factor> factors;
      collect_factors(s, 1, coef, factors);
      return build_product(coef, std::move(factors));
    }
    default: return fold_function(e.op(), simplify_node(e.arg()));
  }
}

}  // namespace

Expression simplify(const Expression& e) { return simplify_node(e); }

bool symbolically_equal(const Expression& a, const Expression& b) {
  return simplify(Expression::binary(Op::Sub, a, b)).is_zero();
}

}  // namespace hdw
