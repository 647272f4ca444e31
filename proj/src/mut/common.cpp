#include "common.hpp"

#include "rtlmut/elab/consteval.hpp"
#include "rtlmut/hdl/literal.hpp"

namespace rtlmut::mut {

using hdl::Node;
using hdl::NodeKind;
using hdl::NodePath;

bool perturbable(const Node& n) {
  if (n.kind != NodeKind::Number) return false;
  auto lit = hdl::parse_literal(n.text);
  return lit && !lit->has_unknown();
}

namespace {

void collect_literals(const Node& n, NodePath& path, std::vector<NodePath>& out) {
  if (n.kind == NodeKind::Number) {
    out.push_back(path);
    return;
  }
  for (std::uint32_t k = 0; k < n.children.size(); ++k) {
    if ((n.kind == NodeKind::BitSelect || n.kind == NodeKind::PartSelect) && k > 0) continue;
    path.push_back(k);
    collect_literals(n.child(k), path, out);
    path.pop_back();
  }
}

std::optional<std::int64_t> constant(const Node& e, const elab::Instance& inst) {
  try {
    return elab::eval_const(e, inst.params);
  } catch (const elab::NotConstant&) {
    return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool in_range(std::int64_t v, const DeclRange& r) { return v >= r.lo() && v <= r.hi(); }

void count_rec(const elab::Design& d, const Node& n, const elab::Instance& inst, std::size_t& bad) {
  if (n.kind == NodeKind::BitSelect) {
    const Node& base = n.child(0);
    std::optional<DeclRange> r;
    if (base.kind == NodeKind::Ident) {
      if (auto it = inst.signals.find(base.text); it != inst.signals.end() && it->second.is_array) {
        r = DeclRange{it->second.array_hi, it->second.array_lo};
      }
    }
    if (!r) r = declared_range(d, inst, base);
    if (r) {
      if (auto v = constant(n.child(1), inst); v && !in_range(*v, *r)) ++bad;
    }
  } else if (n.kind == NodeKind::PartSelect) {
    if (auto r = declared_range(d, inst, n.child(0))) {
      auto a = constant(n.child(1), inst);
      auto b = constant(n.child(2), inst);
      if (n.text == ":") {
        if (a && b) {
          const bool desc = r->msb >= r->lsb;
          if (!in_range(*a, *r) || !in_range(*b, *r) || (*a != *b && (desc ? *a < *b : *a > *b))) ++bad;
        }
      } else if (a && b) {
        const std::int64_t other = n.text == "+:" ? *a + *b - 1 : *a - *b + 1;
        if (*b <= 0 || !in_range(*a, *r) || !in_range(other, *r)) ++bad;
      }
    }
  }
  for (const auto& c : n.children) count_rec(d, c, inst, bad);
}

}  // namespace

std::vector<NodePath> rhs_literals(const Node& rhs) {
  std::vector<NodePath> out;
  NodePath path;
  collect_literals(rhs, path, out);
  return out;
}

std::optional<DeclRange> declared_range(const elab::Design&, const elab::Instance& inst, const Node& base) {
  if (base.kind == NodeKind::Ident) {
    auto it = inst.signals.find(base.text);
    if (it == inst.signals.end() || it->second.is_array) return std::nullopt;
    return DeclRange{it->second.msb, it->second.lsb};
  }
  if (base.kind == NodeKind::BitSelect && base.child(0).kind == NodeKind::Ident) {
    auto it = inst.signals.find(base.child(0).text);
    if (it == inst.signals.end() || !it->second.is_array) return std::nullopt;
    return DeclRange{it->second.msb, it->second.lsb};
  }
  return std::nullopt;
}

std::size_t count_illegal_selects(const elab::Design& d, const Node& module, const elab::Instance& inst) {
  std::size_t bad = 0;
  count_rec(d, module, inst, bad);
  return bad;
}

}  // namespace rtlmut::mut
