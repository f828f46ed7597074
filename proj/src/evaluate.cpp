#include "eval_ops.hpp"

#include <algorithm>
#include <array>

namespace planar {

namespace {

struct Env {
  double x1, x2, t;
  const ParamMap& params;
};

double eval(const Expr& e, const Env& env) {
  const auto kids = e.children();
  switch (e.op()) {
    case Op::Constant:
      return e.value();
    case Op::Variable:
      return e.var() == Var::X1 ? env.x1 : e.var() == Var::X2 ? env.x2 : env.t;
    case Op::Parameter: {
      auto it = env.params.find(e.name());
      if (it == env.params.end()) throw UnknownIdentifier(e.name());
      return it->second;
    }
    case Op::Add: {
      double acc = eval(kids[0], env);
      for (std::size_t i = 1; i < kids.size(); ++i) acc = detail::checked(acc + eval(kids[i], env));
      return acc;
    }
    case Op::Mul: {
      double acc = eval(kids[0], env);
      for (std::size_t i = 1; i < kids.size(); ++i) acc = detail::checked(acc * eval(kids[i], env));
      return acc;
    }
    case Op::Sub: {
      const double a = eval(kids[0], env);
      return detail::checked(a - eval(kids[1], env));
    }
    case Op::Div: {
      const double a = eval(kids[0], env);
      return detail::divide(a, eval(kids[1], env));
    }
    case Op::Pow: {
      const double b = eval(kids[0], env);
      return detail::power(b, eval(kids[1], env));
    }
    default:
      return detail::apply_unary(e.op(), eval(kids[0], env));
  }
}

}  // namespace

double evaluate(const Expr& e, const Point2& p, double time, const ParamMap& params) {
  return eval(e, Env{p.x(), p.y(), time, params});
}

// ---------------------------------------------------------------------------

namespace {

// Postfix code; returns the stack depth reached while evaluating e.
std::size_t emit(const Expr& e, const ParamMap& params, std::vector<CompiledExpr::Instr>& code,
                 std::size_t depth) {
  using Instr = CompiledExpr::Instr;
  const auto kids = e.children();
  switch (e.op()) {
    case Op::Constant:
      code.push_back({Op::Constant, 0, e.value()});
      return depth + 1;
    case Op::Variable:
      code.push_back({Op::Variable, 0, static_cast<double>(e.var())});
      return depth + 1;
    case Op::Parameter: {
      auto it = params.find(e.name());
      if (it == params.end()) throw UnknownIdentifier(e.name());
      code.push_back({Op::Constant, 0, it->second});
      return depth + 1;
    }
    default:
      break;
  }
  std::size_t peak = 0;
  for (std::size_t i = 0; i < kids.size(); ++i) peak = std::max(peak, emit(kids[i], params, code, depth + i));
  code.push_back(Instr{e.op(), static_cast<std::uint32_t>(kids.size()), 0.0});
  return std::max(peak, depth + 1);
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const ParamMap& params) {
  max_stack_ = emit(e, params, code_, 0);
}

double CompiledExpr::operator()(double x1, double x2, double time) const {
  if (code_.empty()) return 0.0;
  constexpr std::size_t kInline = 64;
  std::array<double, kInline> small;
  std::vector<double> large;
  double* stack = small.data();
  if (max_stack_ > kInline) {
    large.resize(max_stack_);
    stack = large.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Constant:
        stack[sp++] = in.value;
        break;
      case Op::Variable: {
        const auto v = static_cast<Var>(static_cast<int>(in.value));
        stack[sp++] = v == Var::X1 ? x1 : v == Var::X2 ? x2 : time;
        break;
      }
      case Op::Add: {
        const std::size_t base = sp - in.arity;
        double acc = stack[base];
        for (std::size_t i = 1; i < in.arity; ++i) acc = detail::checked(acc + stack[base + i]);
        stack[base] = acc;
        sp = base + 1;
        break;
      }
      case Op::Mul: {
        const std::size_t base = sp - in.arity;
        double acc = stack[base];
        for (std::size_t i = 1; i < in.arity; ++i) acc = detail::checked(acc * stack[base + i]);
        stack[base] = acc;
        sp = base + 1;
        break;
      }
      case Op::Sub:
        --sp;
        stack[sp - 1] = detail::checked(stack[sp - 1] - stack[sp]);
        break;
      case Op::Div:
        --sp;
        stack[sp - 1] = detail::divide(stack[sp - 1], stack[sp]);
        break;
      case Op::Pow:
        --sp;
        stack[sp - 1] = detail::power(stack[sp - 1], stack[sp]);
        break;
      default:
        stack[sp - 1] = detail::apply_unary(in.op, stack[sp - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace planar
