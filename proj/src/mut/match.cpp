#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "rtlmut/hdl/literal.hpp"
#include "rtlmut/mut/mutate.hpp"
#include "common.hpp"

namespace rtlmut::mut {

using hdl::Node;
using hdl::NodeKind;
using hdl::NodePath;

bool is_validity_name(const std::string& name, const std::vector<std::string>& patterns) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t start = 0;
  while (start <= lower.size()) {
    auto end = lower.find('_', start);
    if (end == std::string::npos) end = lower.size();
    const std::string tok = lower.substr(start, end - start);
    for (const auto& p : patterns) {
      std::string pl;
      for (char c : p) pl += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (tok == pl || (pl.size() >= 4 && tok.find(pl) != std::string::npos)) return true;
    }
    start = end + 1;
  }
  return false;
}

std::string Candidate::describe() const {
  return std::string(operator_name(op)) + " " + file + ":" + std::to_string(line) + ":" + std::to_string(col) + " " +
         variant + " @" + hdl::path_to_string(path);
}

namespace {

struct Ctx {
  bool index = false;
  bool bound = false;
  bool range = false;
  bool delay = false;
  bool params = false;
  bool event = false;
  bool rhs = false;
  int always_assigns = -1;
};

std::size_t count_assigns(const Node& n) {
  std::size_t c = (n.kind == NodeKind::BlockingAssign || n.kind == NodeKind::NonblockingAssign) ? 1 : 0;
  for (const auto& ch : n.children) c += count_assigns(ch);
  return c;
}

bool is_shift(const std::string& op) { return op == "<<" || op == ">>" || op == "<<<" || op == ">>>"; }

class Matcher {
 public:
  Matcher(const elab::Design& d, const elab::MutationTarget& t, const std::vector<NodePath>& fanin,
          const MutationConfig& cfg, std::vector<Candidate>& out)
      : d_(d), t_(t), cfg_(cfg), out_(out), inst_(d.first_instance(t.module)) {
    root_ = d.files[d.file_index(t.file)].ast.get();
    for (const auto& p : fanin) {
      drivers_.insert(p);
      for (std::size_t k = 2; k < p.size(); ++k) ancestors_.insert(NodePath(p.begin(), p.begin() + k));
    }
  }

  void run() {
    const auto mi = d_.modules.at(t_.module).index;
    const Node& mod = root_->child(mi);
    NodePath path{mi};
    for (std::uint32_t i = 2; i < mod.children.size(); ++i) {
      path.push_back(i);
      visit(mod.child(i), path, Ctx{}, nullptr, 0);
      path.pop_back();
    }
  }

 private:
  bool eligible(const NodePath& p) const {
    if (ancestors_.count(p)) return true;
    NodePath prefix;
    for (std::size_t d = 0; d < p.size(); ++d) {
      prefix.push_back(p[d]);
      if (drivers_.count(prefix)) return true;
      if (d + 1 < p.size() && ancestors_.count(prefix)) {
        const Node* n = hdl::node_at(*root_, prefix);
        const auto c = p[d + 1];
        switch (n->kind) {
          case NodeKind::If:
          case NodeKind::DelayStmt:
          case NodeKind::Instantiation:
            if (c == 0) return true;
            break;
          case NodeKind::Case:
            if (c == 0) return true;
            if (d + 2 < p.size() && p[d + 2] + 1 < n->child(c).children.size()) return true;
            break;
          default:
            break;
        }
      }
    }
    return false;
  }

  void add(OperatorId op, const Node& anchor, const NodePath& path, std::string variant) {
    if (!cfg_.operators.count(op)) return;
    Candidate c;
    c.target = t_;
    c.op = op;
    c.file = t_.file;
    c.path = path;
    c.variant = std::move(variant);
    c.line = anchor.span.line;
    c.col = anchor.span.col;
    out_.push_back(std::move(c));
  }

  void visit_number(const Node& n, const NodePath& path, const Ctx& ctx, const Node* parent, std::size_t idx) {
    if (!perturbable(n)) return;
    if (ctx.index && !ctx.range) add(OperatorId::IDX_OFFSET, n, path, "delta");
    if (parent && parent->kind == NodeKind::Binary && is_shift(parent->text) && idx == 1) {
      add(OperatorId::SHIFT_AMT, n, path, "delta");
    }
    const bool positional = ctx.index || ctx.bound || ctx.range;
    if (ctx.always_assigns >= 2 && !positional && !ctx.delay && !ctx.event) add(OperatorId::STMT_CONST, n, path, "delta");
    if (ctx.rhs && !positional) add(OperatorId::ASSIGN_CONST, n, path, "delta");
    if (ctx.params && parent && parent->kind == NodeKind::Connection) add(OperatorId::INST_PARAM, n, path, "delta");
    if (ctx.delay && parent && parent->kind == NodeKind::Delay) add(OperatorId::DELAY_CONST, n, path, "delta");
  }

  void guard_predicates(const Node& n, NodePath& path) {
    auto matches = [&](const Node& e) {
      return e.kind == NodeKind::Ident && is_validity_name(e.text, cfg_.validity_patterns);
    };
    const bool pred = matches(n) ||
                      (n.kind == NodeKind::Unary && (n.text == "!" || n.text == "~") && matches(n.child(0))) ||
                      (n.kind == NodeKind::BitSelect && matches(n.child(0)));
    if (pred) {
      add(OperatorId::GUARD_FORCE, n, path, "false");
      add(OperatorId::GUARD_FORCE, n, path, "true");
      return;
    }
    for (std::uint32_t k = 0; k < n.children.size(); ++k) {
      path.push_back(k);
      guard_predicates(n.child(k), path);
      path.pop_back();
    }
  }

  void visit(const Node& n, NodePath& path, const Ctx& ctx, const Node* parent, std::size_t idx) {
    if (eligible(path)) match_node(n, path, ctx, parent, idx);
    for (std::uint32_t k = 0; k < n.children.size(); ++k) {
      Ctx c = ctx;
      switch (n.kind) {
        case NodeKind::Range:
          c.range = true;
          break;
        case NodeKind::BitSelect:
          if (k == 1) c.index = true;
          break;
        case NodeKind::PartSelect:
          if (k >= 1) {
            if (n.text == ":") {
              c.bound = true;
            } else if (k == 1) {
              c.index = true;
            } else {
              c.range = true;
            }
          }
          break;
        case NodeKind::Delay:
          c.delay = true;
          break;
        case NodeKind::ParamArgs:
          c.params = true;
          break;
        case NodeKind::EventControl:
          c.event = true;
          break;
        case NodeKind::BlockingAssign:
        case NodeKind::NonblockingAssign:
          c.rhs = k == 1;
          break;
        case NodeKind::ContinuousAssign:
          c.rhs = k == 2;
          break;
        case NodeKind::Declarator:
          c.rhs = k == 1 && parent && parent->kind == NodeKind::NetDecl && parent->child(0).text == "wire";
          break;
        case NodeKind::Always:
          c.always_assigns = static_cast<int>(count_assigns(n));
          break;
        default:
          break;
      }
      path.push_back(k);
      visit(n.child(k), path, c, &n, k);
      path.pop_back();
    }
  }

  void match_node(const Node& n, NodePath& path, const Ctx& ctx, const Node* parent, std::size_t idx) {
    switch (n.kind) {
      case NodeKind::Number:
        visit_number(n, path, ctx, parent, idx);
        break;
      case NodeKind::PartSelect:
        if (n.text == ":" && n.child(1).kind == NodeKind::Number && n.child(2).kind == NodeKind::Number &&
            declared_range(d_, inst_, n.child(0))) {
          for (const char* v : {"left+1", "left-1", "right+1", "right-1"}) add(OperatorId::PARTSEL_BOUND, n, path, v);
          add(OperatorId::SLICE_MIRROR, n, path, "mirror");
        }
        break;
      case NodeKind::Ternary:
        for (const char* v : {"force_false", "force_true", "swap"}) add(OperatorId::TERNARY_BRANCH, n, path, v);
        break;
      case NodeKind::Binary:
        if (relop_partner(n.text)) add(OperatorId::RELOP_SWAP, n, path, "swap");
        break;
      case NodeKind::If: {
        path.push_back(0);
        guard_predicates(n.child(0), path);
        path.pop_back();
        if (n.child(1).kind != NodeKind::NullStmt) add(OperatorId::IF_REMOVE, n, path, "then");
        if (!n.child(2).empty()) add(OperatorId::IF_REMOVE, n, path, "else");
        break;
      }
      case NodeKind::Case: {
        if (n.aux == "case") {
          add(OperatorId::CASE_SEMANTICS, n, path, "to_casex");
          add(OperatorId::CASE_SEMANTICS, n, path, "to_casez");
        } else {
          add(OperatorId::CASE_SEMANTICS, n, path, "to_case");
        }
        for (std::size_t k = 1; k + 1 < n.children.size(); ++k) {
          add(OperatorId::CASE_SEMANTICS, n, path, "swap_" + std::to_string(k));
        }
        if (n.children.size() > 2) {
          for (std::size_t k = 1; k < n.children.size(); ++k) {
            if (n.child(k).text != "default") add(OperatorId::CASE_REMOVE, n, path, "arm_" + std::to_string(k));
          }
        }
        break;
      }
      case NodeKind::InstanceItem:
        port_swaps(n, path);
        break;
      case NodeKind::Concat:
        for (std::size_t k = 0; k + 1 < n.children.size(); ++k) {
          add(OperatorId::CONCAT_SWAP, n, path, "swap_" + std::to_string(k));
        }
        break;
      case NodeKind::BlockingAssign:
      case NodeKind::NonblockingAssign:
        if (parent && parent->kind == NodeKind::Block) {
          const auto lits = rhs_literals(n.child(1));
          for (std::size_t k = 0; k < lits.size(); ++k) {
            if (perturbable(*hdl::node_at(n.child(1), lits[k]))) add(OperatorId::ASSIGN_DUP, n, path, "lit_" + std::to_string(k));
          }
        }
        break;
      default:
        break;
    }
  }

  void port_swaps(const Node& item, const NodePath& path) {
    const elab::Instance* child = d_.find_instance(inst_.qualify(item.text));
    if (!child) return;
    std::vector<const Node*> named;
    for (const auto& c : item.children) {
      if (!c.text.empty() && !c.child(0).empty() && child->signals.count(c.text)) named.push_back(&c);
    }
    for (std::size_t a = 0; a < named.size(); ++a) {
      for (std::size_t b = a + 1; b < named.size(); ++b) {
        const auto& sa = child->signals.at(named[a]->text);
        const auto& sb = child->signals.at(named[b]->text);
        if (sa.width() != sb.width() || sa.direction != sb.direction) continue;
        add(OperatorId::PORT_SWAP, item, path, "swap_" + named[a]->text + "_" + named[b]->text);
      }
    }
  }

  const elab::Design& d_;
  const elab::MutationTarget& t_;
  const MutationConfig& cfg_;
  std::vector<Candidate>& out_;
  const elab::Instance& inst_;
  const Node* root_ = nullptr;
  std::set<NodePath> drivers_;
  std::set<NodePath> ancestors_;
};

}  // namespace

std::vector<Candidate> match_candidates(const elab::Design& design, const elab::ConnectivityGraph& graph,
                                        const std::vector<elab::MutationTarget>& targets,
                                        const MutationConfig& cfg) {
  std::vector<Candidate> out;
  for (const auto& t : targets) {
    std::vector<Candidate> local;
    Matcher(design, t, elab::fanin_statements(design, graph, t), cfg, local).run();
    std::sort(local.begin(), local.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.file, a.line, a.col, a.op, a.variant, a.path) <
             std::tie(b.file, b.line, b.col, b.op, b.variant, b.path);
    });
    out.insert(out.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
  }
  return out;
}

}  // namespace rtlmut::mut
