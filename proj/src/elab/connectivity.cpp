#include "rtlmut/elab/connectivity.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "rtlmut/util/kv.hpp"

namespace rtlmut::elab {

using hdl::Node;
using hdl::NodeKind;
using hdl::NodePath;

std::string_view node_class_name(NodeClass c) {
  switch (c) {
    case NodeClass::PrimaryInput: return "primary-input";
    case NodeClass::Constant: return "constant";
    case NodeClass::PortThrough: return "port-through";
    case NodeClass::DrivenByLogic: return "driven-by-logic";
  }
  return "?";
}

std::set<std::string> ConnectivityGraph::backward_reachable(const std::vector<std::string>& roots) const {
  std::set<std::string> seen;
  std::deque<std::string> work;
  for (const auto& r : roots) {
    if (has_node(r) && seen.insert(r).second) work.push_back(r);
  }
  while (!work.empty()) {
    const std::string n = work.front();
    work.pop_front();
    auto it = fanin.find(n);
    if (it == fanin.end()) continue;
    for (auto e : it->second) {
      if (seen.insert(edges[e].from).second) work.push_back(edges[e].from);
    }
  }
  return seen;
}

namespace {

class GraphBuilder {
 public:
  GraphBuilder(const Design& d, ConnectivityGraph& g) : d_(d), g_(g) {}

  void run() {
    for (std::size_t i = 0; i < d_.instances.size(); ++i) {
      const auto& inst = d_.instances[i];
      for (const auto& [name, sig] : inst.signals) {
        const auto q = inst.qualify(name);
        g_.nodes.push_back(q);
        g_.instance_of[q] = static_cast<int>(i);
        g_.local_name[q] = name;
      }
    }
    std::sort(g_.nodes.begin(), g_.nodes.end());
    for (std::size_t i = 0; i < d_.instances.size(); ++i) visit_instance(static_cast<int>(i));
    for (std::size_t e = 0; e < g_.edges.size(); ++e) g_.fanin[g_.edges[e].to].push_back(e);
    classify();
  }

 private:
  std::vector<std::string> support(const Node& expr, const Instance& inst) const {
    std::vector<std::string> out;
    for (const auto& id : hdl::collect_identifiers(expr)) {
      if (inst.signals.count(id)) out.push_back(inst.qualify(id));
    }
    return out;
  }

  // Base signals written by an lvalue, plus index signals it reads.
  void lvalue_parts(const Node& lv, const Instance& inst, std::vector<std::string>& bases,
                    std::vector<std::string>& index_support) const {
    if (lv.kind == NodeKind::Concat) {
      for (const auto& c : lv.children) lvalue_parts(c, inst, bases, index_support);
      return;
    }
    const Node* base = &lv;
    while (base->kind == NodeKind::BitSelect || base->kind == NodeKind::PartSelect) {
      for (std::size_t k = 1; k < base->children.size(); ++k) {
        auto s = support(base->child(k), inst);
        index_support.insert(index_support.end(), s.begin(), s.end());
      }
      base = &base->child(0);
    }
    if (base->kind == NodeKind::Ident) bases.push_back(inst.qualify(base->text));
  }

  void add(const std::vector<std::string>& targets, const std::vector<std::string>& sources, const std::string& file,
           const NodePath& path, bool trivial) {
    for (const auto& t : targets) {
      g_.drivers[t].push_back({file, path, trivial, !sources.empty()});
      std::set<std::string> unique(sources.begin(), sources.end());
      for (const auto& s : unique) g_.edges.push_back({s, t, file, path, trivial});
    }
  }

  void visit_stmt(const Node& st, NodePath& path, const Instance& inst, const std::string& file,
                  std::vector<std::string>& conds) {
    switch (st.kind) {
      case NodeKind::Block:
        for (std::uint32_t k = 0; k < st.children.size(); ++k) {
          path.push_back(k);
          visit_stmt(st.child(k), path, inst, file, conds);
          path.pop_back();
        }
        break;
      case NodeKind::If: {
        const auto before = conds.size();
        auto s = support(st.child(0), inst);
        conds.insert(conds.end(), s.begin(), s.end());
        for (std::uint32_t k = 1; k <= 2; ++k) {
          if (st.child(k).empty()) continue;
          path.push_back(k);
          visit_stmt(st.child(k), path, inst, file, conds);
          path.pop_back();
        }
        conds.resize(before);
        break;
      }
      case NodeKind::Case: {
        const auto before = conds.size();
        auto s = support(st.child(0), inst);
        conds.insert(conds.end(), s.begin(), s.end());
        for (std::uint32_t k = 1; k < st.children.size(); ++k) {
          const Node& item = st.child(k);
          for (std::size_t l = 0; l + 1 < item.children.size(); ++l) {
            auto ls = support(item.child(l), inst);
            conds.insert(conds.end(), ls.begin(), ls.end());
          }
        }
        for (std::uint32_t k = 1; k < st.children.size(); ++k) {
          const Node& item = st.child(k);
          path.push_back(k);
          path.push_back(static_cast<std::uint32_t>(item.children.size() - 1));
          visit_stmt(item.children.back(), path, inst, file, conds);
          path.pop_back();
          path.pop_back();
        }
        conds.resize(before);
        break;
      }
      case NodeKind::BlockingAssign:
      case NodeKind::NonblockingAssign: {
        std::vector<std::string> bases, sources = support(st.child(1), inst);
        lvalue_parts(st.child(0), inst, bases, sources);
        sources.insert(sources.end(), conds.begin(), conds.end());
        add(bases, sources, file, path, false);
        break;
      }
      case NodeKind::DelayStmt:
        path.push_back(1);
        visit_stmt(st.child(1), path, inst, file, conds);
        path.pop_back();
        break;
      default:
        break;
    }
  }

  void visit_instance(int idx) {
    const Instance& inst = d_.instances[idx];
    const Node& mod = d_.module_node(inst.module);
    const std::string& file = d_.module_file(inst.module).path;
    const auto mi = d_.modules.at(inst.module).index;

    for (std::uint32_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      switch (item.kind) {
        case NodeKind::NetDecl:
          if (item.child(0).text != "wire") break;
          for (std::uint32_t k = 1; k < item.children.size(); ++k) {
            const Node& decl = item.child(k);
            if (decl.child(1).empty()) continue;
            const bool trivial = decl.child(1).kind == NodeKind::Ident && inst.signals.count(decl.child(1).text);
            add({inst.qualify(decl.text)}, support(decl.child(1), inst), file, {mi, i, k}, trivial);
          }
          break;
        case NodeKind::ContinuousAssign: {
          std::vector<std::string> bases, sources = support(item.child(2), inst);
          lvalue_parts(item.child(1), inst, bases, sources);
          const bool trivial = item.child(1).kind == NodeKind::Ident && item.child(2).kind == NodeKind::Ident &&
                               inst.signals.count(item.child(2).text);
          add(bases, sources, file, {mi, i}, trivial);
          break;
        }
        case NodeKind::Always: {
          std::vector<std::string> conds;
          for (const auto& ev : item.child(0).children) {
            if (ev.aux.empty()) continue;
            auto s = support(ev.child(0), inst);
            conds.insert(conds.end(), s.begin(), s.end());
          }
          NodePath path{mi, i, 1};
          visit_stmt(item.child(1), path, inst, file, conds);
          break;
        }
        case NodeKind::Instantiation:
          for (std::uint32_t j = 1; j < item.children.size(); ++j) visit_connections(inst, item, mi, i, j, file);
          break;
        default:
          break;
      }
    }
  }

  void visit_connections(const Instance& inst, const Node& item, std::uint32_t mi, std::uint32_t i, std::uint32_t j,
                         const std::string& file) {
    const Node& ii = item.child(j);
    const Instance* child = d_.find_instance(inst.qualify(ii.text));
    for (std::uint32_t k = 0; k < ii.children.size(); ++k) {
      const Node& conn = ii.child(k);
      if (conn.child(0).empty()) continue;
      const std::string port = conn.text.empty() ? child->port_order.at(k) : conn.text;
      const Signal& ps = child->signals.at(port);
      const std::string inner = child->qualify(port);
      const Node& expr = conn.child(0);
      const bool trivial = expr.kind == NodeKind::Ident && inst.signals.count(expr.text);
      NodePath path{mi, i, j, k};
      if (ps.direction == Direction::Input) {
        add({inner}, support(expr, inst), file, path, trivial);
      } else {
        std::vector<std::string> bases, sources{inner};
        lvalue_parts(expr, inst, bases, sources);
        add(bases, sources, file, path, trivial);
      }
    }
  }

  void classify() {
    const Instance& top = d_.instances.front();
    for (const auto& n : g_.nodes) {
      const Instance& inst = d_.instances[g_.instance_of.at(n)];
      const Signal& s = inst.signals.at(g_.local_name.at(n));
      NodeClass c = NodeClass::Constant;
      if (&inst == &top && s.direction == Direction::Input) {
        c = NodeClass::PrimaryInput;
      } else if (auto it = g_.drivers.find(n); it != g_.drivers.end()) {
        bool logic = false, through = false;
        for (const auto& drv : it->second) {
          if (drv.trivial) through = true;
          else if (drv.has_support) logic = true;
        }
        c = logic ? NodeClass::DrivenByLogic : through ? NodeClass::PortThrough : NodeClass::Constant;
      }
      g_.classes[n] = c;
    }
  }

  const Design& d_;
  ConnectivityGraph& g_;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Identifier inside a reset guard such as `!rst_n`, `rst`, `rst_n == 1'b0`.
const Node* guard_ident(const Node& cond, bool& negated) {
  negated = false;
  if (cond.kind == NodeKind::Ident) return &cond;
  if (cond.kind == NodeKind::Unary && (cond.text == "!" || cond.text == "~") && cond.child(0).kind == NodeKind::Ident) {
    negated = true;
    return &cond.child(0);
  }
  if (cond.kind == NodeKind::Binary && (cond.text == "==" || cond.text == "!=") &&
      cond.child(0).kind == NodeKind::Ident && cond.child(1).kind == NodeKind::Number) {
    const bool zero = cond.child(1).text.find_first_of("123456789") == std::string::npos ||
                      cond.child(1).text.back() == '0';
    negated = (cond.text == "==") == zero;
    return &cond.child(0);
  }
  return nullptr;
}

}  // namespace

ConnectivityGraph build_connectivity(const Design& design) {
  ConnectivityGraph g;
  GraphBuilder(design, g).run();
  return g;
}

std::set<std::string> ClockReset::all() const {
  std::set<std::string> out = clocks;
  for (const auto& [n, low] : resets) out.insert(n);
  return out;
}

bool ResetPatterns::matches(const std::string& name) const {
  for (auto token : util::split(lower(name), '_')) {
    for (const auto& stem : stems) {
      if (token == stem || token == stem + "n") return true;
    }
  }
  return false;
}

bool ResetPatterns::active_low(const std::string& name) {
  const auto l = lower(name);
  return !l.empty() && l.back() == 'n';
}

ClockReset classify_clock_reset(const Design& design, const ConnectivityGraph& graph, const ResetPatterns& patterns) {
  ClockReset cr;
  for (const auto& inst : design.instances) {
    const Node& mod = design.module_node(inst.module);
    for (std::size_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      if (item.kind != NodeKind::Always) continue;
      bool sequential = false;
      for (const auto& ev : item.child(0).children) {
        if (ev.aux.empty() || ev.child(0).kind != NodeKind::Ident) continue;
        sequential = true;
        const auto& name = ev.child(0).text;
        if (patterns.matches(name)) {
          cr.resets[inst.qualify(name)] = ev.aux == "negedge";
        } else {
          cr.clocks.insert(inst.qualify(name));
        }
      }
      if (!sequential) continue;
      const Node* first = &item.child(1);
      while (first->kind == NodeKind::Block && !first->children.empty()) first = &first->child(0);
      if (first->kind != NodeKind::If) continue;
      bool negated = false;
      const Node* id = guard_ident(first->child(0), negated);
      if (id && inst.signals.count(id->text) && patterns.matches(id->text)) {
        cr.resets.emplace(inst.qualify(id->text), negated);
      }
    }
  }

  // Propagate up through pure renames so top-level inputs are classified.
  auto propagate = [&](const std::string& start, auto&& mark) {
    std::deque<std::string> work{start};
    std::set<std::string> seen{start};
    while (!work.empty()) {
      auto n = work.front();
      work.pop_front();
      auto it = graph.fanin.find(n);
      if (it == graph.fanin.end()) continue;
      for (auto e : it->second) {
        const auto& edge = graph.edges[e];
        if (!edge.trivial || !seen.insert(edge.from).second) continue;
        mark(edge.from);
        work.push_back(edge.from);
      }
    }
  };
  for (const auto& c : std::set<std::string>(cr.clocks)) {
    propagate(c, [&](const std::string& n) { cr.clocks.insert(n); });
  }
  for (const auto& [r, low] : std::map<std::string, bool>(cr.resets)) {
    const bool active_low = low;
    propagate(r, [&](const std::string& n) { cr.resets.emplace(n, active_low); });
  }
  return cr;
}

std::vector<MutationTarget> resolve_targets(const Design& design, const ConnectivityGraph& graph,
                                            const ClockReset& clock_reset,
                                            const std::vector<std::string>& spec_signals) {
  const auto excluded = clock_reset.all();
  std::set<MutationTarget> out;
  for (const auto& s : spec_signals) {
    if (s.find('.') != std::string::npos || !graph.has_node(s)) throw UnknownSpecSignal(s);
    if (excluded.count(s)) continue;
    std::set<std::string> found;
    std::deque<std::string> work{s};
    std::set<std::string> seen{s};
    while (!work.empty()) {
      auto n = work.front();
      work.pop_front();
      if (graph.classes.at(n) == NodeClass::DrivenByLogic) {
        found.insert(n);
        continue;
      }
      auto it = graph.fanin.find(n);
      if (it == graph.fanin.end()) continue;
      for (auto e : it->second) {
        const auto& edge = graph.edges[e];
        if (edge.trivial && seen.insert(edge.from).second) work.push_back(edge.from);
      }
    }
    if (found.empty()) throw NoLogicDriver(s);
    for (const auto& n : found) {
      if (excluded.count(n)) continue;
      const auto& inst = design.instances[graph.instance_of.at(n)];
      out.insert({inst.module, graph.local_name.at(n), design.module_file(inst.module).path});
    }
  }
  return {out.begin(), out.end()};
}

std::vector<NodePath> fanin_statements(const Design& design, const ConnectivityGraph& graph,
                                       const MutationTarget& target) {
  const Instance& inst = design.first_instance(target.module);
  const int idx = graph.instance_of.at(inst.qualify(target.signal));
  std::set<NodePath> out;
  const std::string start = inst.qualify(target.signal);
  std::deque<std::string> work{start};
  std::set<std::string> seen{start};
  while (!work.empty()) {
    auto n = work.front();
    work.pop_front();
    if (auto d = graph.drivers.find(n); d != graph.drivers.end()) {
      for (const auto& drv : d->second) {
        if (drv.file == target.file) out.insert(drv.path);
      }
    }
    auto it = graph.fanin.find(n);
    if (it == graph.fanin.end()) continue;
    for (auto e : it->second) {
      const auto& from = graph.edges[e].from;
      if (graph.instance_of.at(from) != idx) continue;
      if (seen.insert(from).second) work.push_back(from);
    }
  }
  // Drivers from the parent module (connections into this instance) are
  // outside the target module and do not belong to its cone.
  const auto mi = design.modules.at(target.module).index;
  std::vector<NodePath> result;
  for (const auto& p : out) {
    if (!p.empty() && p[0] == mi) result.push_back(p);
  }
  return result;
}

std::string format_targets(const std::vector<MutationTarget>& targets) {
  std::string out = "# module\tsignal\tfile\n";
  for (const auto& t : targets) out += t.module + "\t" + t.signal + "\t" + t.file + "\n";
  return out;
}

}  // namespace rtlmut::elab
