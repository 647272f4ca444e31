#include "rtlmut/elab/consteval.hpp"

#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/literal.hpp"

namespace rtlmut::elab {

using hdl::Node;
using hdl::NodeKind;

std::int64_t clog2(std::int64_t v) {
  std::int64_t r = 0;
  for (std::int64_t x = 1; x < v; x <<= 1) ++r;
  return r;
}

namespace {

std::int64_t binary(const std::string& op, std::int64_t a, std::int64_t b, const Node& n) {
  if (op == "+") return a + b;
  if (op == "-") return a - b;
  if (op == "*") return a * b;
  if (op == "/" || op == "%") {
    if (b == 0) throw NotConstant("division by zero in " + hdl::emit_expression(n));
    return op == "/" ? a / b : a % b;
  }
  if (op == "**") {
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < b; ++i) r *= a;
    return r;
  }
  if (op == "<<" || op == "<<<") return b >= 64 ? 0 : static_cast<std::int64_t>(static_cast<std::uint64_t>(a) << b);
  if (op == ">>") return b >= 64 ? 0 : static_cast<std::int64_t>(static_cast<std::uint64_t>(a) >> b);
  if (op == ">>>") return b >= 64 ? (a < 0 ? -1 : 0) : a >> b;
  if (op == "&") return a & b;
  if (op == "|") return a | b;
  if (op == "^") return a ^ b;
  if (op == "~^") return ~(a ^ b);
  if (op == "&&") return (a && b) ? 1 : 0;
  if (op == "||") return (a || b) ? 1 : 0;
  if (op == "==" || op == "===") return a == b;
  if (op == "!=" || op == "!==") return a != b;
  if (op == "<") return a < b;
  if (op == "<=") return a <= b;
  if (op == ">") return a > b;
  if (op == ">=") return a >= b;
  throw NotConstant("operator " + op + " in constant expression");
}

}  // namespace

std::int64_t eval_const(const Node& expr, const ParamEnv& env) {
  switch (expr.kind) {
    case NodeKind::Number: {
      auto lit = hdl::parse_literal(expr.text);
      if (!lit || lit->has_unknown()) throw NotConstant("literal " + expr.text);
      return static_cast<std::int64_t>(lit->value);
    }
    case NodeKind::Ident: {
      auto it = env.find(expr.text);
      if (it == env.end()) throw NotConstant("'" + expr.text + "' is not a parameter");
      return it->second;
    }
    case NodeKind::Unary: {
      const auto v = eval_const(expr.child(0), env);
      const auto& op = expr.text;
      if (op == "-") return -v;
      if (op == "+") return v;
      if (op == "!") return v == 0;
      if (op == "~") return ~v;
      throw NotConstant("operator " + op + " in constant expression");
    }
    case NodeKind::Binary:
      return binary(expr.text, eval_const(expr.child(0), env), eval_const(expr.child(1), env), expr);
    case NodeKind::Ternary:
      return eval_const(expr.child(0), env) ? eval_const(expr.child(1), env) : eval_const(expr.child(2), env);
    case NodeKind::SysCall:
      if (expr.text == "$clog2" && expr.children.size() == 1) return clog2(eval_const(expr.child(0), env));
      break;
    default:
      break;
  }
  throw NotConstant(hdl::emit_expression(expr) + " is not constant");
}

}  // namespace rtlmut::elab
