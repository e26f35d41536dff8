#pragma once

// Flat postfix form of an Expression for repeated numeric evaluation.

#include <span>
#include <string>
#include <vector>

#include "hdw/expr.hpp"

namespace hdw {

class CompiledExpression {
 public:
  CompiledExpression() = default;
  // Every variable of `e` must appear in `slots`; the i-th slot is read from
  // values[i] at evaluation time.
  CompiledExpression(const Expression& e, const std::vector<std::string>& slots);

  double operator()(std::span<const double> values) const;

 private:
  struct Instr {
    Op op;
    int index;  // slot for Var, constant pool index for Const
    int exponent;
  };
  std::vector<Instr> code_;
  std::vector<double> constants_;
  std::size_t depth_ = 0;
  std::size_t slot_count_ = 0;

  void emit(const Expression& e, const std::vector<std::string>& slots,
            std::size_t height);
};

}  // namespace hdw
