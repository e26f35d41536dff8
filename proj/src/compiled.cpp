#include "hdw/compiled.hpp"

#include <algorithm>
#include <array>

namespace hdw {

CompiledExpression::CompiledExpression(const Expression& e,
                                       const std::vector<std::string>& slots)
    : slot_count_(slots.size()) {
  emit(e, slots, 1);
}

void CompiledExpression::emit(const Expression& e,
                              const std::vector<std::string>& slots,
                              std::size_t height) {
  depth_ = std::max(depth_, height);
  switch (e.op()) {
    case Op::Const:
      constants_.push_back(e.value());
      code_.push_back({Op::Const, static_cast<int>(constants_.size() - 1), 0});
      return;
    case Op::Var: {
      auto it = std::find(slots.begin(), slots.end(), e.name());
      if (it == slots.end()) throw UnboundVariable(e.name());
      code_.push_back({Op::Var, static_cast<int>(it - slots.begin()), 0});
      return;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      emit(e.lhs(), slots, height);
      emit(e.rhs(), slots, height + 1);
      code_.push_back({e.op(), 0, 0});
      return;
    case Op::Pow:
      emit(e.arg(), slots, height);
      code_.push_back({Op::Pow, 0, e.exponent()});
      return;
    default:
      emit(e.arg(), slots, height);
      code_.push_back({e.op(), 0, 0});
      return;
  }
}

double CompiledExpression::operator()(std::span<const double> values) const {
  if (code_.empty()) return 0.0;
  if (values.size() < slot_count_) {
    throw Error("compiled expression evaluated with too few values");
  }
  std::array<double, 64> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (depth_ > small.size()) {
    large.resize(depth_);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: stack[top++] = constants_[in.index]; break;
      case Op::Var: stack[top++] = values[in.index]; break;
      case Op::Add: --top; stack[top - 1] += stack[top]; break;
      case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::Div: --top; stack[top - 1] /= stack[top]; break;
      case Op::Pow:
        stack[top - 1] = integer_power(stack[top - 1], in.exponent);
        break;
      default: stack[top - 1] = apply_function(in.op, stack[top - 1]); break;
    }
  }
  return stack[0];
}

}  // namespace hdw
