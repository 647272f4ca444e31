#include "rtlmut/sim/expr.hpp"

#include <algorithm>
#include <bit>

#include "rtlmut/elab/consteval.hpp"
#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/literal.hpp"

namespace rtlmut::sim {

using hdl::Node;
using hdl::NodeKind;

std::int64_t VarRef::position(std::int64_t i) const {
  const std::int64_t p = msb >= lsb ? i - lsb : lsb - i;
  return (p < 0 || p >= static_cast<std::int64_t>(width)) ? -1 : p;
}

std::uint64_t literal_value(const std::string& text, std::uint32_t* width) {
  auto lit = hdl::parse_literal(text);
  if (!lit) throw UnsupportedForSim("literal '" + text + "' does not fit in 64 bits");
  if (width) *width = lit->width;
  return lit->value;
}

namespace {

std::optional<std::int64_t> fold(const Node& n, const Resolver& resolve) {
  elab::ParamEnv env;
  for (const auto& id : hdl::collect_identifiers(n)) {
    auto r = resolve(id);
    if (!r || !r->is_constant) return std::nullopt;
    env[id] = static_cast<std::int64_t>(r->constant);
  }
  try {
    return elab::eval_const(n, env);
  } catch (const elab::NotConstant&) {
    return std::nullopt;
  }
}

std::int64_t require_const(const Node& n, const Resolver& resolve, const char* what) {
  auto v = fold(n, resolve);
  if (!v) throw UnsupportedForSim(std::string(what) + " must be constant: " + hdl::emit_expression(n));
  return *v;
}

VarRef require_var(const std::string& name, const Resolver& resolve) {
  auto r = resolve(name);
  if (!r) throw SimError("unknown signal '" + name + "'");
  return *r;
}

bool is_context_op(const std::string& op) {
  return op == "+" || op == "-" || op == "*" || op == "/" || op == "%" || op == "&" || op == "|" || op == "^" ||
         op == "~^";
}

bool is_compare(const std::string& op) {
  return op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

std::uint64_t ipow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  while (exp) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

std::uint64_t slice(std::uint64_t v, std::int64_t low, std::uint32_t width) {
  if (low >= 64 || low <= -64) return 0;
  const std::uint64_t shifted = low >= 0 ? v >> low : v << -low;
  return shifted & mask_of(width);
}

}  // namespace

std::uint32_t ExprProgram::push(ExprNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t ExprProgram::self_width(const Node& e, const Resolver& resolve) const {
  switch (e.kind) {
    case NodeKind::Number: {
      std::uint32_t w = 32;
      literal_value(e.text, &w);
      return w;
    }
    case NodeKind::Ident:
      return require_var(e.text, resolve).width;
    case NodeKind::BitSelect: {
      if (e.child(0).kind == NodeKind::Ident) {
        auto r = require_var(e.child(0).text, resolve);
        if (r.is_array) return r.width;
      }
      return 1;
    }
    case NodeKind::PartSelect:
      if (e.text == ":") {
        const auto m = require_const(e.child(1), resolve, "part-select bound");
        const auto l = require_const(e.child(2), resolve, "part-select bound");
        return static_cast<std::uint32_t>((m >= l ? m - l : l - m) + 1);
      }
      return static_cast<std::uint32_t>(require_const(e.child(2), resolve, "part-select width"));
    case NodeKind::Unary:
      if (e.text == "~" || e.text == "-" || e.text == "+") return self_width(e.child(0), resolve);
      return 1;
    case NodeKind::Binary: {
      const auto& op = e.text;
      if (is_compare(op) || op == "&&" || op == "||") return 1;
      if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**") return self_width(e.child(0), resolve);
      return std::max(self_width(e.child(0), resolve), self_width(e.child(1), resolve));
    }
    case NodeKind::Ternary:
      return std::max(self_width(e.child(1), resolve), self_width(e.child(2), resolve));
    case NodeKind::Concat: {
      std::uint32_t w = 0;
      for (const auto& c : e.children) w += self_width(c, resolve);
      return w;
    }
    case NodeKind::Replicate: {
      const auto n = require_const(e.child(0), resolve, "replication count");
      return static_cast<std::uint32_t>(n) * self_width(e.child(1), resolve);
    }
    case NodeKind::SysCall:
      if (e.text == "$unsigned" || e.text == "$past") return e.children.empty() ? 1 : self_width(e.child(0), resolve);
      if (e.text == "$clog2") return 32;
      return 1;
    default:
      throw UnsupportedForSim("expression kind " + std::string(hdl::kind_name(e.kind)));
  }
}

std::uint32_t ExprProgram::compile_select(const Node& e, const Resolver& resolve, bool allow_sampled) {
  const Node& base = e.child(0);
  // Array word access: mem[i]
  if (e.kind == NodeKind::BitSelect && base.kind == NodeKind::Ident) {
    auto r = require_var(base.text, resolve);
    if (r.is_array) {
      if (auto k = fold(e.child(1), resolve)) {
        const auto off = *k - r.array_lo;
        if (off < 0 || off >= r.array_size) return push({Op::Const, r.width});
        ExprNode n{Op::Var, r.width};
        n.c = r.slot + static_cast<std::uint32_t>(off);
        return push(std::move(n));
      }
      ExprNode n{Op::ArrayRead, r.width};
      n.a = compile(e.child(1), 0, resolve, allow_sampled);
      n.c = r.slot;
      n.imm = static_cast<std::uint64_t>(r.array_size);
      n.imm2 = r.array_lo;
      return push(std::move(n));
    }
  }

  // Vector select on a signal or on an array word.
  VarRef decl;
  std::uint32_t value = 0;
  if (base.kind == NodeKind::Ident) {
    decl = require_var(base.text, resolve);
    if (decl.is_array) throw UnsupportedForSim("array '" + base.text + "' needs a word index");
    value = compile(base, 0, resolve, allow_sampled);
  } else if (base.kind == NodeKind::BitSelect && base.child(0).kind == NodeKind::Ident &&
             require_var(base.child(0).text, resolve).is_array) {
    decl = require_var(base.child(0).text, resolve);
    value = compile_select(base, resolve, allow_sampled);
  } else {
    throw UnsupportedForSim("select on expression: " + hdl::emit_expression(e));
  }

  const bool desc = decl.msb >= decl.lsb;
  auto raw_pos = [&](std::int64_t i) { return desc ? i - decl.lsb : decl.lsb - i; };

  if (e.kind == NodeKind::BitSelect) {
    if (auto k = fold(e.child(1), resolve)) {
      ExprNode n{Op::ConstSlice, 1};
      n.a = value;
      n.imm2 = raw_pos(*k);
      if (n.imm2 < 0 || n.imm2 >= decl.width) return push({Op::Const, 1});
      return push(std::move(n));
    }
    ExprNode n{Op::BitSel, 1};
    n.a = value;
    n.b = compile(e.child(1), 0, resolve, allow_sampled);
    n.imm = static_cast<std::uint64_t>(decl.msb);
    n.imm2 = decl.lsb;
    n.c = decl.width;
    return push(std::move(n));
  }

  if (e.text == ":") {
    const auto m = require_const(e.child(1), resolve, "part-select bound");
    const auto l = require_const(e.child(2), resolve, "part-select bound");
    ExprNode n{Op::ConstSlice, static_cast<std::uint32_t>((m >= l ? m - l : l - m) + 1)};
    n.a = value;
    n.imm2 = std::min(raw_pos(m), raw_pos(l));
    return push(std::move(n));
  }

  const auto w = require_const(e.child(2), resolve, "part-select width");
  if (w <= 0 || w > 64) throw UnsupportedForSim("part-select width out of range");
  const bool plus = e.text == "+:";
  std::int64_t k = 0;
  if (desc) {
    k = plus ? -decl.lsb : 1 - w - decl.lsb;
  } else {
    k = plus ? decl.lsb - w + 1 : decl.lsb;
  }
  if (auto b = fold(e.child(1), resolve)) {
    ExprNode n{Op::ConstSlice, static_cast<std::uint32_t>(w)};
    n.a = value;
    n.imm2 = desc ? *b + k : k - *b;
    return push(std::move(n));
  }
  ExprNode n{Op::DynSlice, static_cast<std::uint32_t>(w)};
  n.a = value;
  n.b = compile(e.child(1), 0, resolve, allow_sampled);
  n.imm = desc ? 1 : 0;
  n.imm2 = k;
  return push(std::move(n));
}

std::uint32_t ExprProgram::compile(const Node& e, std::uint32_t ctx, const Resolver& resolve, bool allow_sampled) {
  switch (e.kind) {
    case NodeKind::Number: {
      std::uint32_t w = 32;
      ExprNode n{Op::Const};
      n.imm = literal_value(e.text, &w);
      n.width = w;
      return push(std::move(n));
    }
    case NodeKind::Ident: {
      auto r = require_var(e.text, resolve);
      if (r.is_array) throw UnsupportedForSim("array '" + e.text + "' used without index");
      if (r.is_constant) {
        ExprNode n{Op::Const, r.width};
        n.imm = r.constant & mask_of(r.width);
        return push(std::move(n));
      }
      ExprNode n{Op::Var, r.width};
      n.c = r.slot;
      return push(std::move(n));
    }
    case NodeKind::BitSelect:
    case NodeKind::PartSelect:
      return compile_select(e, resolve, allow_sampled);
    case NodeKind::Unary: {
      const auto& op = e.text;
      if (op == "~" || op == "-" || op == "+") {
        const auto w = std::max(ctx, self_width(e.child(0), resolve));
        const auto a = compile(e.child(0), w, resolve, allow_sampled);
        if (op == "+") return a;
        ExprNode n{op == "~" ? Op::Not : Op::Neg, w};
        n.a = a;
        return push(std::move(n));
      }
      ExprNode n{Op::LogNot, 1};
      n.a = compile(e.child(0), 0, resolve, allow_sampled);
      if (op == "&") n.op = Op::RedAnd;
      else if (op == "|") n.op = Op::RedOr;
      else if (op == "^") n.op = Op::RedXor;
      else if (op == "~&") n.op = Op::RedNand;
      else if (op == "~|") n.op = Op::RedNor;
      else if (op == "~^") n.op = Op::RedXnor;
      else if (op != "!") throw UnsupportedForSim("unary operator " + op);
      n.c = self_width(e.child(0), resolve);
      return push(std::move(n));
    }
    case NodeKind::Binary: {
      const auto& op = e.text;
      ExprNode n;
      if (is_context_op(op)) {
        const auto w = std::max({ctx, self_width(e.child(0), resolve), self_width(e.child(1), resolve)});
        n.width = w;
        n.a = compile(e.child(0), w, resolve, allow_sampled);
        n.b = compile(e.child(1), w, resolve, allow_sampled);
        n.op = op == "+" ? Op::Add : op == "-" ? Op::Sub : op == "*" ? Op::Mul : op == "/" ? Op::Div
             : op == "%" ? Op::Mod : op == "&" ? Op::And : op == "|" ? Op::Or : op == "^" ? Op::Xor : Op::Xnor;
      } else if (op == "**" || op == "<<" || op == ">>" || op == "<<<" || op == ">>>") {
        const auto w = std::max(ctx, self_width(e.child(0), resolve));
        n.width = w;
        n.a = compile(e.child(0), w, resolve, allow_sampled);
        n.b = compile(e.child(1), 0, resolve, allow_sampled);
        n.op = op == "**" ? Op::Pow : (op == "<<" || op == "<<<") ? Op::Shl : Op::Shr;
      } else if (is_compare(op)) {
        const auto w = std::max(self_width(e.child(0), resolve), self_width(e.child(1), resolve));
        n.width = 1;
        n.a = compile(e.child(0), w, resolve, allow_sampled);
        n.b = compile(e.child(1), w, resolve, allow_sampled);
        n.op = (op == "==" || op == "===") ? Op::Eq : (op == "!=" || op == "!==") ? Op::Ne : op == "<" ? Op::Lt
             : op == "<=" ? Op::Le : op == ">" ? Op::Gt : Op::Ge;
      } else if (op == "&&" || op == "||") {
        n.width = 1;
        n.a = compile(e.child(0), 0, resolve, allow_sampled);
        n.b = compile(e.child(1), 0, resolve, allow_sampled);
        n.op = op == "&&" ? Op::LogAnd : Op::LogOr;
      } else {
        throw UnsupportedForSim("binary operator " + op);
      }
      return push(std::move(n));
    }
    case NodeKind::Ternary: {
      const auto w = std::max({ctx, self_width(e.child(1), resolve), self_width(e.child(2), resolve)});
      ExprNode n{Op::Ternary, w};
      n.a = compile(e.child(0), 0, resolve, allow_sampled);
      n.b = compile(e.child(1), w, resolve, allow_sampled);
      n.c = compile(e.child(2), w, resolve, allow_sampled);
      return push(std::move(n));
    }
    case NodeKind::Concat:
    case NodeKind::Replicate: {
      const auto w = self_width(e, resolve);
      if (w > 64) throw UnsupportedForSim("concatenation wider than 64 bits");
      ExprNode n{Op::Concat, w};
      if (e.kind == NodeKind::Concat) {
        for (const auto& c : e.children) n.list.push_back(compile(c, 0, resolve, allow_sampled));
      } else {
        const auto count = require_const(e.child(0), resolve, "replication count");
        const auto inner = compile(e.child(1), 0, resolve, allow_sampled);
        for (std::int64_t i = 0; i < count; ++i) n.list.push_back(inner);
      }
      return push(std::move(n));
    }
    case NodeKind::SysCall: {
      const auto& f = e.text;
      if (f == "$unsigned" && e.children.size() == 1) return compile(e.child(0), ctx, resolve, allow_sampled);
      if (f == "$clog2" && e.children.size() == 1) {
        ExprNode n{Op::Const, 32};
        n.imm = static_cast<std::uint64_t>(elab::clog2(require_const(e.child(0), resolve, "$clog2 argument")));
        return push(std::move(n));
      }
      if (allow_sampled && !e.children.empty()) {
        if (f == "$past" && e.children.size() <= 2) {
          ExprNode n{Op::Past};
          n.a = compile(e.child(0), 0, resolve, true);
          n.width = nodes_[n.a].width;
          n.imm = e.children.size() == 2 ? static_cast<std::uint64_t>(require_const(e.child(1), resolve, "$past depth")) : 1;
          return push(std::move(n));
        }
        ExprNode n{Op::Rose, 1};
        if (f == "$rose") n.op = Op::Rose;
        else if (f == "$fell") n.op = Op::Fell;
        else if (f == "$stable") n.op = Op::Stable;
        else if (f == "$onehot") n.op = Op::OneHot;
        else if (f == "$onehot0") n.op = Op::OneHot0;
        else throw UnsupportedForSim("system function " + f);
        if (e.children.size() != 1) throw UnsupportedForSim(f + " takes one argument");
        n.a = compile(e.child(0), 0, resolve, true);
        return push(std::move(n));
      }
      throw UnsupportedForSim("system function " + f);
    }
    default:
      throw UnsupportedForSim("expression kind " + std::string(hdl::kind_name(e.kind)));
  }
}

std::uint64_t ExprProgram::eval(std::uint32_t i, const Frame& f) const {
  const ExprNode& n = nodes_[i];
  const auto m = mask_of(n.width);
  switch (n.op) {
    case Op::Const: return n.imm;
    case Op::Var: return f.vals[n.c];
    case Op::ArrayRead: {
      const auto idx = static_cast<std::int64_t>(eval(n.a, f)) - n.imm2;
      if (idx < 0 || idx >= static_cast<std::int64_t>(n.imm)) return 0;
      return f.vals[n.c + idx];
    }
    case Op::BitSel: {
      const auto idx = static_cast<std::int64_t>(eval(n.b, f));
      const auto msb = static_cast<std::int64_t>(n.imm);
      const auto p = msb >= n.imm2 ? idx - n.imm2 : n.imm2 - idx;
      if (p < 0 || p >= static_cast<std::int64_t>(n.c)) return 0;
      return (eval(n.a, f) >> p) & 1;
    }
    case Op::ConstSlice: return slice(eval(n.a, f), n.imm2, n.width);
    case Op::DynSlice: {
      const auto idx = static_cast<std::int64_t>(eval(n.b, f));
      return slice(eval(n.a, f), n.imm ? idx + n.imm2 : n.imm2 - idx, n.width);
    }
    case Op::Not: return ~eval(n.a, f) & m;
    case Op::Neg: return (0 - eval(n.a, f)) & m;
    case Op::LogNot: return eval(n.a, f) == 0;
    case Op::RedAnd: return eval(n.a, f) == mask_of(n.c);
    case Op::RedOr: return eval(n.a, f) != 0;
    case Op::RedXor: return std::popcount(eval(n.a, f)) & 1;
    case Op::RedNand: return eval(n.a, f) != mask_of(n.c);
    case Op::RedNor: return eval(n.a, f) == 0;
    case Op::RedXnor: return (~std::popcount(eval(n.a, f))) & 1;
    case Op::Add: return (eval(n.a, f) + eval(n.b, f)) & m;
    case Op::Sub: return (eval(n.a, f) - eval(n.b, f)) & m;
    case Op::Mul: return (eval(n.a, f) * eval(n.b, f)) & m;
    case Op::Div: {
      const auto d = eval(n.b, f);
      return d == 0 ? 0 : (eval(n.a, f) / d) & m;
    }
    case Op::Mod: {
      const auto d = eval(n.b, f);
      return d == 0 ? 0 : (eval(n.a, f) % d) & m;
    }
    case Op::Pow: return ipow(eval(n.a, f), eval(n.b, f)) & m;
    case Op::And: return eval(n.a, f) & eval(n.b, f);
    case Op::Or: return eval(n.a, f) | eval(n.b, f);
    case Op::Xor: return eval(n.a, f) ^ eval(n.b, f);
    case Op::Xnor: return ~(eval(n.a, f) ^ eval(n.b, f)) & m;
    case Op::Shl: {
      const auto s = eval(n.b, f);
      return s >= 64 ? 0 : (eval(n.a, f) << s) & m;
    }
    case Op::Shr: {
      const auto s = eval(n.b, f);
      return s >= 64 ? 0 : eval(n.a, f) >> s;
    }
    case Op::Eq: return eval(n.a, f) == eval(n.b, f);
    case Op::Ne: return eval(n.a, f) != eval(n.b, f);
    case Op::Lt: return eval(n.a, f) < eval(n.b, f);
    case Op::Le: return eval(n.a, f) <= eval(n.b, f);
    case Op::Gt: return eval(n.a, f) > eval(n.b, f);
    case Op::Ge: return eval(n.a, f) >= eval(n.b, f);
    case Op::LogAnd: return eval(n.a, f) != 0 && eval(n.b, f) != 0;
    case Op::LogOr: return eval(n.a, f) != 0 || eval(n.b, f) != 0;
    case Op::Ternary: return eval(n.a, f) != 0 ? eval(n.b, f) : eval(n.c, f);
    case Op::Concat: {
      std::uint64_t v = 0;
      for (auto c : n.list) {
        const auto w = nodes_[c].width;
        v = (w >= 64 ? 0 : v << w) | (eval(c, f) & mask_of(w));
      }
      return v;
    }
    case Op::Past: {
      if (!f.rows) throw SimError("$past outside a trace context");
      if (f.cycle < n.imm) return 0;
      const auto c = f.cycle - n.imm;
      return eval(n.a, Frame{(*f.rows)[c].data(), f.rows, c});
    }
    case Op::Rose:
    case Op::Fell:
    case Op::Stable: {
      if (!f.rows) throw SimError("sampled-value function outside a trace context");
      const auto cur = eval(n.a, f);
      const auto prev = f.cycle == 0 ? 0 : eval(n.a, Frame{(*f.rows)[f.cycle - 1].data(), f.rows, f.cycle - 1});
      if (n.op == Op::Stable) return cur == prev;
      if (n.op == Op::Rose) return (cur & 1) && !(prev & 1);
      return !(cur & 1) && (prev & 1);
    }
    case Op::OneHot: return std::popcount(eval(n.a, f)) == 1;
    case Op::OneHot0: return std::popcount(eval(n.a, f)) <= 1;
  }
  return 0;
}

void ExprProgram::reads(std::uint32_t i, std::vector<std::pair<std::uint32_t, std::uint64_t>>& out) const {
  const ExprNode& n = nodes_[i];
  switch (n.op) {
    case Op::Const: return;
    case Op::Var: out.emplace_back(n.c, ~0ULL); return;
    case Op::ArrayRead:
      for (std::uint64_t k = 0; k < n.imm; ++k) out.emplace_back(n.c + static_cast<std::uint32_t>(k), ~0ULL);
      reads(n.a, out);
      return;
    case Op::ConstSlice:
      if (nodes_[n.a].op == Op::Var && n.imm2 >= 0 && n.imm2 < 64) {
        out.emplace_back(nodes_[n.a].c, mask_of(n.width) << n.imm2);
        return;
      }
      reads(n.a, out);
      return;
    case Op::Concat:
      for (auto c : n.list) reads(c, out);
      return;
    case Op::BitSel:
    case Op::DynSlice:
      reads(n.a, out);
      reads(n.b, out);
      return;
    case Op::Ternary:
      reads(n.a, out);
      reads(n.b, out);
      reads(n.c, out);
      return;
    case Op::Not: case Op::Neg: case Op::LogNot: case Op::RedAnd: case Op::RedOr: case Op::RedXor:
    case Op::RedNand: case Op::RedNor: case Op::RedXnor: case Op::Past: case Op::Rose: case Op::Fell:
    case Op::Stable: case Op::OneHot: case Op::OneHot0:
      reads(n.a, out);
      return;
    default:
      reads(n.a, out);
      reads(n.b, out);
      return;
  }
}

}  // namespace rtlmut::sim
