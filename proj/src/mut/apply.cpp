#include <stdexcept>

#include "common.hpp"
#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/literal.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/mut/mutate.hpp"

namespace rtlmut::mut {

using hdl::EditKind;
using hdl::Node;
using hdl::NodeKind;
using hdl::NodePath;

namespace {

struct Fail {
  std::string reason;
};

std::size_t suffix_index(const std::string& variant, const std::string& prefix) {
  if (variant.rfind(prefix, 0) != 0) throw Fail{"bad variant '" + variant + "'"};
  return std::stoul(variant.substr(prefix.size()));
}

void perturb(Node& n, std::int64_t delta) {
  if (n.kind != NodeKind::Number) throw Fail{"anchor is not a literal"};
  auto next = hdl::perturb_literal(n.text, delta);
  if (!next) throw Fail{"literal has x/z digits"};
  if (*next == n.text) throw Fail{"no-op"};
  n.text = *next;
}

void expect_kind(const Node& n, NodeKind k) {
  if (n.kind != k) throw Fail{"anchor kind changed"};
}

struct Outcome {
  EditKind kind = EditKind::Replace;
  NodePath path;
};

Outcome mutate(const elab::Design& d, Node& root, const Candidate& c, const MutationConfig& cfg) {
  Node* anchor = hdl::node_at(root, c.path);
  if (!anchor) throw Fail{"anchor path does not resolve"};
  Node& n = *anchor;
  const elab::Instance& inst = d.first_instance(c.target.module);
  Outcome out{EditKind::Replace, c.path};
  switch (c.op) {
    case OperatorId::IDX_OFFSET:
    case OperatorId::SHIFT_AMT:
    case OperatorId::STMT_CONST:
    case OperatorId::ASSIGN_CONST:
    case OperatorId::INST_PARAM:
    case OperatorId::DELAY_CONST:
      perturb(n, cfg.delta);
      break;
    case OperatorId::PARTSEL_BOUND:
    case OperatorId::SLICE_MIRROR: {
      expect_kind(n, NodeKind::PartSelect);
      auto r = declared_range(d, inst, n.child(0));
      auto left = hdl::parse_literal(n.child(1).text);
      auto right = hdl::parse_literal(n.child(2).text);
      if (!r || !left || !right || left->has_unknown() || right->has_unknown()) throw Fail{"no declared range"};
      auto m = static_cast<std::int64_t>(left->value);
      auto l = static_cast<std::int64_t>(right->value);
      if (c.op == OperatorId::SLICE_MIRROR) {
        const auto nm = r->msb + r->lsb - l;
        const auto nl = r->msb + r->lsb - m;
        m = nm;
        l = nl;
      } else if (c.variant == "left+1") {
        ++m;
      } else if (c.variant == "left-1") {
        --m;
      } else if (c.variant == "right+1") {
        ++l;
      } else if (c.variant == "right-1") {
        --l;
      } else {
        throw Fail{"bad variant '" + c.variant + "'"};
      }
      const bool desc = r->msb >= r->lsb;
      if (m < r->lo() || m > r->hi() || l < r->lo() || l > r->hi() || (desc ? m < l : m > l)) throw Fail{"range"};
      const auto nm_text = hdl::format_literal(*left, static_cast<std::uint64_t>(m));
      const auto nl_text = hdl::format_literal(*right, static_cast<std::uint64_t>(l));
      if (nm_text == n.child(1).text && nl_text == n.child(2).text) throw Fail{"no-op"};
      n.child(1).text = nm_text;
      n.child(2).text = nl_text;
      break;
    }
    case OperatorId::TERNARY_BRANCH: {
      expect_kind(n, NodeKind::Ternary);
      if (c.variant == "force_true") {
        Node keep = n.child(1);
        n = std::move(keep);
      } else if (c.variant == "force_false") {
        Node keep = n.child(2);
        n = std::move(keep);
      } else if (c.variant == "swap") {
        if (hdl::structurally_equal(n.child(1), n.child(2))) throw Fail{"no-op"};
        std::swap(n.children[1], n.children[2]);
      } else {
        throw Fail{"bad variant '" + c.variant + "'"};
      }
      break;
    }
    case OperatorId::RELOP_SWAP: {
      expect_kind(n, NodeKind::Binary);
      auto partner = relop_partner(n.text);
      if (!partner) throw Fail{"operator has no swap partner"};
      n.text = std::string(*partner);
      break;
    }
    case OperatorId::GUARD_FORCE: {
      Node lit(NodeKind::Number, c.variant == "true" ? "1'b1" : "1'b0");
      lit.span = n.span;
      n = std::move(lit);
      break;
    }
    case OperatorId::CASE_SEMANTICS: {
      expect_kind(n, NodeKind::Case);
      if (c.variant.rfind("to_", 0) == 0) {
        const auto flavor = c.variant.substr(3);
        if (flavor == n.aux) throw Fail{"no-op"};
        n.aux = flavor;
      } else {
        const auto k = suffix_index(c.variant, "swap_");
        if (k < 1 || k + 1 >= n.children.size()) throw Fail{"arm index out of range"};
        auto& a = n.children[k].children.back();
        auto& b = n.children[k + 1].children.back();
        if (hdl::structurally_equal(a, b)) throw Fail{"no-op"};
        std::swap(a, b);
      }
      break;
    }
    case OperatorId::IF_REMOVE: {
      expect_kind(n, NodeKind::If);
      if (c.variant == "then") {
        if (n.child(1).kind == NodeKind::NullStmt) throw Fail{"no-op"};
        Node null(NodeKind::NullStmt);
        null.span = n.child(1).span;
        n.children[1] = std::move(null);
        out.path.push_back(1);
      } else {
        if (n.child(2).empty()) throw Fail{"no-op"};
        n.children[2] = Node(NodeKind::Empty);
        out.path.push_back(2);
      }
      break;
    }
    case OperatorId::CASE_REMOVE: {
      expect_kind(n, NodeKind::Case);
      const auto k = suffix_index(c.variant, "arm_");
      if (k < 1 || k >= n.children.size()) throw Fail{"arm index out of range"};
      if (n.child(k).text == "default") throw Fail{"default arm"};
      if (n.children.size() <= 2) throw Fail{"last arm"};
      n.children.erase(n.children.begin() + static_cast<std::ptrdiff_t>(k));
      out.kind = EditKind::Delete;
      out.path.push_back(static_cast<std::uint32_t>(k));
      break;
    }
    case OperatorId::PORT_SWAP: {
      expect_kind(n, NodeKind::InstanceItem);
      const auto rest = c.variant.substr(5);
      Node* a = nullptr;
      Node* b = nullptr;
      for (auto& conn : n.children) {
        if (conn.text.empty()) continue;
        for (auto& other : n.children) {
          if (&other == &conn || other.text.empty()) continue;
          if (rest == conn.text + "_" + other.text) {
            a = &conn;
            b = &other;
          }
        }
      }
      if (!a || !b || a->child(0).empty() || b->child(0).empty()) throw Fail{"ports not connected"};
      if (hdl::structurally_equal(a->child(0), b->child(0))) throw Fail{"no-op"};
      std::swap(a->children[0], b->children[0]);
      break;
    }
    case OperatorId::CONCAT_SWAP: {
      expect_kind(n, NodeKind::Concat);
      const auto k = suffix_index(c.variant, "swap_");
      if (k + 1 >= n.children.size()) throw Fail{"operand index out of range"};
      if (hdl::structurally_equal(n.child(k), n.child(k + 1))) throw Fail{"no-op"};
      std::swap(n.children[k], n.children[k + 1]);
      break;
    }
    case OperatorId::ASSIGN_DUP: {
      if (n.kind != NodeKind::BlockingAssign && n.kind != NodeKind::NonblockingAssign) throw Fail{"anchor kind changed"};
      if (c.path.empty()) throw Fail{"anchor has no parent"};
      Node* parent = hdl::node_at(root, std::span(c.path).first(c.path.size() - 1));
      if (!parent || parent->kind != NodeKind::Block) throw Fail{"not in a block"};
      Node dup = n;
      const auto lits = rhs_literals(dup.child(1));
      const auto k = suffix_index(c.variant, "lit_");
      if (k >= lits.size()) throw Fail{"literal index out of range"};
      perturb(*hdl::node_at(dup.child(1), lits[k]), cfg.delta);
      const auto at = c.path.back() + 1;
      parent->children.insert(parent->children.begin() + at, std::move(dup));
      out.kind = EditKind::Insert;
      break;
    }
  }
  return out;
}

hdl::EditRecord make_record(const Node& golden, const Node& mutated, const Candidate& c, const Outcome& o) {
  hdl::EditRecord e;
  e.operator_id = std::string(operator_name(c.op));
  e.variant = c.variant;
  e.kind = o.kind;
  e.file = c.file;
  e.path = o.path;
  const Node* g = hdl::node_at(golden, o.path);
  e.line = g ? g->span.line : c.line;
  switch (o.kind) {
    case EditKind::Replace:
      e.before_fragment = hdl::emit_fragment(*g);
      e.after_fragment = hdl::emit_fragment(*hdl::node_at(mutated, o.path));
      break;
    case EditKind::Delete:
      e.before_fragment = hdl::emit_fragment(*g);
      break;
    case EditKind::Insert: {
      NodePath ins = o.path;
      ins.back() += 1;
      e.after_fragment = hdl::emit_fragment(*hdl::node_at(mutated, ins));
      break;
    }
  }
  return e;
}

struct Screened {
  Node tree;
  std::string text;
  hdl::EditRecord edit;
};

Screened screen(const elab::Design& d, const Candidate& c, const MutationConfig& cfg) {
  const auto fi = d.file_index(c.file);
  const Node& golden = *d.files[fi].ast;
  Node tree = golden;
  const Outcome o = mutate(d, tree, c, cfg);
  if (hdl::structurally_equal(golden, tree)) throw Fail{"no-op"};
  const auto mi = d.modules.at(c.target.module).index;
  const elab::Instance& inst = d.first_instance(c.target.module);
  if (count_illegal_selects(d, tree.child(mi), inst) > count_illegal_selects(d, golden.child(mi), inst)) {
    throw Fail{"range"};
  }
  hdl::EditRecord edit = make_record(golden, tree, c, o);
  if (edit.before_fragment == edit.after_fragment) throw Fail{"no-op"};
  Node clean = hdl::sanitize(tree);
  hdl::assign_ids(clean);
  std::string text = hdl::emit(clean);
  try {
    Node back = hdl::parse_text(c.file, text);
    if (!hdl::structurally_equal(back, clean)) throw Fail{"reparse: tree differs"};
  } catch (const Fail&) {
    throw;
  } catch (const std::exception& e) {
    throw Fail{std::string("reparse: ") + e.what()};
  }
  try {
    elab::rebuild(d, {{c.file, text}});
  } catch (const std::exception& e) {
    throw Fail{std::string("elaboration: ") + e.what()};
  }
  return {std::move(clean), std::move(text), std::move(edit)};
}

}  // namespace

ProbeResult probe_apply(const elab::Design& design, const Candidate& cand, const MutationConfig& cfg) {
  try {
    return screen(design, cand, cfg).edit;
  } catch (const Fail& f) {
    return Infeasible{f.reason};
  } catch (const std::exception& e) {
    return Infeasible{e.what()};
  }
}

Applied apply_operator(const elab::Design& design, const Candidate& cand, const MutationConfig& cfg,
                       const hdl::EditRecord& expected) {
  Screened s;
  try {
    s = screen(design, cand, cfg);
  } catch (const Fail& f) {
    throw InfeasibleAtApply(cand.describe() + ": " + f.reason);
  }
  const auto& e = s.edit;
  if (e.operator_id != expected.operator_id || e.path != expected.path || e.kind != expected.kind ||
      e.before_fragment != expected.before_fragment || e.after_fragment != expected.after_fragment) {
    throw InfeasibleAtApply(cand.describe() + ": edit differs from probe");
  }
  return {std::move(s.tree), std::move(s.text), std::move(s.edit)};
}

ProbeResult apply_in_place(const elab::Design& design, Node& file_root, const Candidate& cand,
                           const MutationConfig& cfg) {
  try {
    const Node before = file_root;
    const Outcome o = mutate(design, file_root, cand, cfg);
    return make_record(before, file_root, cand, o);
  } catch (const Fail& f) {
    return Infeasible{f.reason};
  }
}

}  // namespace rtlmut::mut
