#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/hdl/ast.hpp"

namespace rtlmut::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedForSim : public SimError {
 public:
  using SimError::SimError;
};

inline std::uint64_t mask_of(std::uint32_t width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

/// Storage binding for an identifier. Arrays occupy `array_size`
/// consecutive slots starting at `slot`.
struct VarRef {
  std::uint32_t slot = 0;
  std::uint32_t width = 1;
  std::int64_t msb = 0;
  std::int64_t lsb = 0;
  bool is_array = false;
  std::int64_t array_lo = 0;
  std::int64_t array_size = 0;
  bool is_constant = false;  // parameter: value in `constant`
  std::uint64_t constant = 0;

  /// Bit position of declared index `i`, or -1 when out of range.
  std::int64_t position(std::int64_t i) const;
};

enum class Op : std::uint8_t {
  Const,
  Var,
  ArrayRead,    // a = word index expr
  BitSel,       // a = value, b = index expr; imm/imm2 = declared msb/lsb
  ConstSlice,   // a = value, imm = low position
  DynSlice,     // a = value, b = declared low index expr; imm/imm2 = declared msb/lsb
  Not, Neg, LogNot,
  RedAnd, RedOr, RedXor, RedNand, RedNor, RedXnor,
  Add, Sub, Mul, Div, Mod, Pow, And, Or, Xor, Xnor,
  Shl, Shr,
  Eq, Ne, Lt, Le, Gt, Ge,
  LogAnd, LogOr,
  Ternary,
  Concat,       // list = operands, most significant first
  Past,         // a = expr, imm = cycles back
  Rose, Fell, Stable,
  OneHot, OneHot0,
};

struct ExprNode {
  Op op = Op::Const;
  std::uint32_t width = 1;
  std::uint32_t a = 0, b = 0, c = 0;
  std::uint64_t imm = 0;
  std::int64_t imm2 = 0;
  std::vector<std::uint32_t> list;

  ExprNode() = default;
  ExprNode(Op o, std::uint32_t w = 1) : op(o), width(w) {}
};

/// Where identifier values live during evaluation. History access is used
/// only by sampled-value functions.
struct Frame {
  const std::uint64_t* vals = nullptr;
  const std::vector<std::vector<std::uint64_t>>* rows = nullptr;
  std::size_t cycle = 0;
};

using Resolver = std::function<std::optional<VarRef>(const std::string&)>;

/// Flat expression store shared by all expressions of one model.
class ExprProgram {
 public:
  /// Compiles `expr` under Verilog sizing rules with context width `ctx`
  /// (0 means self-determined). Throws SimError on unknown identifiers.
  std::uint32_t compile(const hdl::Node& expr, std::uint32_t ctx, const Resolver& resolve, bool allow_sampled = false);
  std::uint32_t self_width(const hdl::Node& expr, const Resolver& resolve) const;

  std::uint64_t eval(std::uint32_t node, const Frame& frame) const;
  const ExprNode& node(std::uint32_t i) const { return nodes_[i]; }
  /// Slots read by the expression rooted at `node`, with the bit mask read
  /// (all ones when the selection is dynamic).
  void reads(std::uint32_t node, std::vector<std::pair<std::uint32_t, std::uint64_t>>& out) const;

 private:
  std::uint32_t push(ExprNode n);
  std::uint32_t compile_select(const hdl::Node& expr, const Resolver& resolve, bool allow_sampled);
  std::vector<ExprNode> nodes_;
};

/// Value of a literal folded to at most 64 bits; x/z bits read as 0.
std::uint64_t literal_value(const std::string& text, std::uint32_t* width);

}  // namespace rtlmut::sim
