#include "rtlmut/sim/model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/literal.hpp"

namespace rtlmut::sim {

using elab::Instance;
using hdl::Node;
using hdl::NodeKind;

bool Model::has_sequential() const { return !seq_.empty(); }

std::uint32_t Model::data_input_bits() const {
  std::uint32_t bits = 0;
  for (const auto& in : inputs_) {
    if (in.role == InputRole::Data) bits += in.width;
  }
  return bits;
}

std::vector<std::string> Model::equivalence_observables() const {
  std::vector<std::string> out;
  for (const auto& o : observed_) {
    if (o.top_output || o.is_reg) out.push_back(o.name);
  }
  return out;
}

int Model::observed_index(const std::string& name) const {
  auto it = std::lower_bound(observed_.begin(), observed_.end(), name,
                             [](const Observed& o, const std::string& n) { return o.name < n; });
  if (it == observed_.end() || it->name != name) return -1;
  return static_cast<int>(it - observed_.begin());
}

class ModelBuilder {
 public:
  ModelBuilder(const elab::Design& d, Model& m) : d_(d), m_(m) {}

  void run() {
    m_.design_id_ = d_.id;
    allocate();
    std::vector<Process> comb;
    for (std::size_t i = 0; i < d_.instances.size(); ++i) lower_instance(static_cast<int>(i), comb);
    schedule(std::move(comb));
    classify_inputs();
    if (delays_ > 0) {
      m_.warnings_.push_back(std::to_string(delays_) + " delay control(s) ignored in cycle simulation");
    }
  }

 private:
  void allocate() {
    std::uint32_t slot = 0;
    for (std::size_t i = 0; i < d_.instances.size(); ++i) {
      const Instance& inst = d_.instances[i];
      for (const auto& [name, s] : inst.signals) {
        if (s.width() > 64) throw UnsupportedForSim("signal '" + inst.qualify(name) + "' is wider than 64 bits");
        Var v;
        v.name = inst.qualify(name);
        v.slot = slot;
        v.width = s.width();
        v.msb = s.msb;
        v.lsb = s.lsb;
        v.is_array = s.is_array;
        v.array_lo = s.array_lo;
        v.array_size = s.array_size();
        v.is_reg = s.is_reg;
        v.top_input = i == 0 && s.direction == elab::Direction::Input;
        v.top_output = i == 0 && s.direction == elab::Direction::Output;
        if (s.init && s.is_reg) {
          try {
            v.init = static_cast<std::uint64_t>(elab::eval_const(*s.init, inst.params)) & mask_of(v.width);
          } catch (const elab::NotConstant&) {
            throw UnsupportedForSim("non-constant initializer on '" + v.name + "'");
          }
        }
        slot += s.is_array ? static_cast<std::uint32_t>(v.array_size) : 1;
        var_index_[v.name] = m_.vars_.size();
        m_.vars_.push_back(v);
      }
    }
    m_.slot_count_ = slot;
    for (const auto& v : m_.vars_) {
      if (v.is_array) {
        for (std::int64_t k = 0; k < v.array_size; ++k) {
          m_.observed_.push_back({v.name + "[" + std::to_string(v.array_lo + k) + "]",
                                  v.slot + static_cast<std::uint32_t>(k), v.width, false, v.is_reg, v.msb, v.lsb});
        }
      } else {
        m_.observed_.push_back({v.name, v.slot, v.width, v.top_output, v.is_reg, v.msb, v.lsb});
      }
    }
    std::sort(m_.observed_.begin(), m_.observed_.end(),
              [](const Observed& a, const Observed& b) { return a.name < b.name; });
  }

  Resolver resolver(const Instance& inst) const {
    return [this, &inst](const std::string& name) -> std::optional<VarRef> {
      if (auto p = inst.params.find(name); p != inst.params.end()) {
        VarRef r;
        r.is_constant = true;
        r.constant = static_cast<std::uint64_t>(p->second);
        const bool wide = p->second < 0 ? p->second < INT32_MIN : p->second > static_cast<std::int64_t>(UINT32_MAX);
        r.width = wide ? 64 : 32;
        r.msb = r.width - 1;
        return r;
      }
      auto it = var_index_.find(inst.qualify(name));
      if (it == var_index_.end()) return std::nullopt;
      const Var& v = m_.vars_[it->second];
      VarRef r;
      r.slot = v.slot;
      r.width = v.width;
      r.msb = v.msb;
      r.lsb = v.lsb;
      r.is_array = v.is_array;
      r.array_lo = v.array_lo;
      r.array_size = v.array_size;
      return r;
    };
  }

  std::optional<std::int64_t> try_const(const Node& e, const Instance& inst) const {
    try {
      return elab::eval_const(e, inst.params);
    } catch (const elab::NotConstant&) {
      return std::nullopt;
    }
  }

  const Var& var_of(const Instance& inst, const std::string& name) const {
    return m_.vars_[var_index_.at(inst.qualify(name))];
  }

  void lower_part(const Node& lv, const Instance& inst, const Resolver& res, LValue& out) {
    if (lv.kind == NodeKind::Concat) {
      for (const auto& c : lv.children) lower_part(c, inst, res, out);
      return;
    }
    LvPart p;
    const Node* base = &lv;
    std::vector<const Node*> selects;
    while (base->kind == NodeKind::BitSelect || base->kind == NodeKind::PartSelect) {
      selects.push_back(base);
      base = &base->child(0);
    }
    std::reverse(selects.begin(), selects.end());
    const Var& v = var_of(inst, base->text);
    p.slot = v.slot;
    p.word_width = v.width;
    p.width = v.width;
    std::size_t si = 0;
    if (v.is_array) {
      if (selects.empty() || selects[0]->kind != NodeKind::BitSelect) {
        throw UnsupportedForSim("array '" + v.name + "' assigned without word index");
      }
      if (auto k = try_const(selects[0]->child(1), inst)) {
        const auto off = *k - v.array_lo;
        // Out-of-range constant word writes are dropped.
        p.slot = (off < 0 || off >= v.array_size) ? UINT32_MAX : v.slot + static_cast<std::uint32_t>(off);
      } else {
        p.dyn_word = true;
        p.word_expr = m_.program_.compile(selects[0]->child(1), 0, res);
        p.array_lo = v.array_lo;
        p.array_size = v.array_size;
      }
      si = 1;
    }
    if (si < selects.size()) {
      if (si + 1 != selects.size()) throw UnsupportedForSim("nested select in assignment target");
      const Node& s = *selects[si];
      const bool desc = v.msb >= v.lsb;
      auto raw = [&](std::int64_t i) { return desc ? i - v.lsb : v.lsb - i; };
      p.desc = desc;
      if (s.kind == NodeKind::BitSelect) {
        p.width = 1;
        if (auto k = try_const(s.child(1), inst)) {
          p.bits = LvPart::Bits::Const;
          p.low = raw(*k);
        } else {
          p.bits = LvPart::Bits::Dyn;
          p.low_expr = m_.program_.compile(s.child(1), 0, res);
          p.k = desc ? -v.lsb : v.lsb;
        }
      } else if (s.text == ":") {
        auto m = try_const(s.child(1), inst);
        auto l = try_const(s.child(2), inst);
        if (!m || !l) throw UnsupportedForSim("non-constant part-select bounds in assignment target");
        p.bits = LvPart::Bits::Const;
        p.width = static_cast<std::uint32_t>((*m >= *l ? *m - *l : *l - *m) + 1);
        p.low = std::min(raw(*m), raw(*l));
      } else {
        auto w = try_const(s.child(2), inst);
        if (!w || *w <= 0 || *w > 64) throw UnsupportedForSim("bad indexed part-select width in assignment target");
        p.width = static_cast<std::uint32_t>(*w);
        const bool plus = s.text == "+:";
        const std::int64_t k = desc ? (plus ? -v.lsb : 1 - *w - v.lsb) : (plus ? v.lsb - *w + 1 : v.lsb);
        if (auto b = try_const(s.child(1), inst)) {
          p.bits = LvPart::Bits::Const;
          p.low = desc ? *b + k : k - *b;
        } else {
          p.bits = LvPart::Bits::Dyn;
          p.low_expr = m_.program_.compile(s.child(1), 0, res);
          p.k = k;
        }
      }
    }
    out.width += p.width;
    out.parts.push_back(p);
  }

  std::uint32_t lower_lvalue(const Node& lv, const Instance& inst, const Resolver& res) {
    LValue out;
    lower_part(lv, inst, res, out);
    if (out.width > 64) throw UnsupportedForSim("assignment target wider than 64 bits");
    m_.lvalues_.push_back(std::move(out));
    return static_cast<std::uint32_t>(m_.lvalues_.size() - 1);
  }

  std::uint32_t push_stmt(Stmt s) {
    m_.stmts_.push_back(std::move(s));
    return static_cast<std::uint32_t>(m_.stmts_.size() - 1);
  }

  std::uint32_t make_assign(std::uint32_t lv, const Node& rhs, const Instance& inst, const Resolver& res,
                            bool nonblocking) {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.lvalue = lv;
    const auto lw = m_.lvalues_[lv].width;
    s.expr = m_.program_.compile(rhs, std::max(lw, m_.program_.self_width(rhs, res)), res);
    s.nonblocking = nonblocking;
    (void)inst;
    return push_stmt(std::move(s));
  }

  CaseLabel lower_label(const Node& label, const std::string& flavor, std::uint32_t width, const Resolver& res) {
    CaseLabel l;
    l.expr = m_.program_.compile(label, width, res);
    if (label.kind == NodeKind::Number) {
      if (auto lit = hdl::parse_literal(label.text); lit && lit->has_unknown()) {
        if (flavor == "casez") {
          l.care = ~lit->z_mask;
          l.never = lit->x_mask != 0;
        } else if (flavor == "casex") {
          l.care = ~(lit->z_mask | lit->x_mask);
        } else {
          l.never = true;
        }
      }
    }
    return l;
  }

  std::uint32_t lower_stmt(const Node& st, const Instance& inst, const Resolver& res) {
    switch (st.kind) {
      case NodeKind::Block: {
        Stmt s;
        s.kind = Stmt::Kind::Block;
        for (const auto& c : st.children) s.children.push_back(lower_stmt(c, inst, res));
        return push_stmt(std::move(s));
      }
      case NodeKind::If: {
        Stmt s;
        s.kind = Stmt::Kind::If;
        s.expr = m_.program_.compile(st.child(0), 0, res);
        s.then_s = lower_stmt(st.child(1), inst, res);
        if (!st.child(2).empty()) s.else_s = lower_stmt(st.child(2), inst, res);
        return push_stmt(std::move(s));
      }
      case NodeKind::Case: {
        Stmt s;
        s.kind = Stmt::Kind::Case;
        std::uint32_t width = m_.program_.self_width(st.child(0), res);
        for (std::size_t k = 1; k < st.children.size(); ++k) {
          const Node& item = st.child(k);
          for (std::size_t l = 0; l + 1 < item.children.size(); ++l) {
            width = std::max(width, m_.program_.self_width(item.child(l), res));
          }
        }
        s.expr = m_.program_.compile(st.child(0), width, res);
        std::int64_t default_arm = -1;
        for (std::size_t k = 1; k < st.children.size(); ++k) {
          const Node& item = st.child(k);
          CaseArm arm;
          for (std::size_t l = 0; l + 1 < item.children.size(); ++l) {
            arm.labels.push_back(lower_label(item.child(l), st.aux, width, res));
          }
          arm.body = lower_stmt(item.children.back(), inst, res);
          if (item.text == "default") default_arm = static_cast<std::int64_t>(s.arms.size());
          s.arms.push_back(std::move(arm));
        }
        // The default arm applies only when no labelled arm matches.
        if (default_arm >= 0 && default_arm + 1 != static_cast<std::int64_t>(s.arms.size())) {
          auto d = s.arms[default_arm];
          s.arms.erase(s.arms.begin() + default_arm);
          s.arms.push_back(std::move(d));
        }
        return push_stmt(std::move(s));
      }
      case NodeKind::BlockingAssign:
      case NodeKind::NonblockingAssign:
        return make_assign(lower_lvalue(st.child(0), inst, res), st.child(1), inst, res,
                           st.kind == NodeKind::NonblockingAssign);
      case NodeKind::DelayStmt:
        ++delays_;
        return lower_stmt(st.child(1), inst, res);
      default: {
        Stmt s;
        s.kind = Stmt::Kind::Null;
        return push_stmt(std::move(s));
      }
    }
  }

  std::string origin(const Instance& inst, const Node& n) const {
    return d_.module_file(inst.module).path + ":" + std::to_string(n.span.line) + " (" +
           (inst.path.empty() ? inst.module : inst.path) + ")";
  }

  void lower_instance(int idx, std::vector<Process>& comb) {
    const Instance& inst = d_.instances[idx];
    const Node& mod = d_.module_node(inst.module);
    const Resolver res = resolver(inst);
    auto simple_assign = [&](const Node& lhs_node, std::uint32_t lv, const Node& rhs, const Resolver& r, const Node& at) {
      (void)lhs_node;
      Process p;
      p.body = make_assign(lv, rhs, inst, r, false);
      p.origin = origin(inst, at);
      comb.push_back(std::move(p));
    };

    for (std::size_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      switch (item.kind) {
        case NodeKind::NetDecl:
          if (item.child(0).text != "wire") break;
          for (std::size_t k = 1; k < item.children.size(); ++k) {
            const Node& decl = item.child(k);
            if (decl.child(1).empty()) continue;
            Node target(NodeKind::Ident, decl.text);
            simple_assign(target, lower_lvalue(target, inst, res), decl.child(1), res, decl);
          }
          break;
        case NodeKind::ContinuousAssign:
          if (!item.child(0).empty()) ++delays_;
          simple_assign(item.child(1), lower_lvalue(item.child(1), inst, res), item.child(2), res, item);
          break;
        case NodeKind::Always: {
          Process p;
          for (const auto& ev : item.child(0).children) {
            if (!ev.aux.empty()) p.sequential = true;
          }
          p.body = lower_stmt(item.child(1), inst, res);
          p.origin = origin(inst, item);
          (p.sequential ? m_.seq_ : comb).push_back(std::move(p));
          break;
        }
        case NodeKind::Instantiation:
          for (std::size_t j = 1; j < item.children.size(); ++j) lower_connections(inst, item.child(j), res, comb);
          break;
        default:
          break;
      }
    }
  }

  void lower_connections(const Instance& inst, const Node& ii, const Resolver& res, std::vector<Process>& comb) {
    const Instance& child = *d_.find_instance(inst.qualify(ii.text));
    const Resolver child_res = resolver(child);
    for (std::size_t k = 0; k < ii.children.size(); ++k) {
      const Node& conn = ii.child(k);
      if (conn.child(0).empty()) continue;
      const std::string port = conn.text.empty() ? child.port_order.at(k) : conn.text;
      const Node port_ident(NodeKind::Ident, port);
      Process p;
      p.origin = origin(inst, conn);
      if (child.signals.at(port).direction == elab::Direction::Input) {
        const auto lv = lower_lvalue(port_ident, child, child_res);
        p.body = make_assign(lv, conn.child(0), inst, res, false);
      } else {
        const auto lv = lower_lvalue(conn.child(0), inst, res);
        p.body = make_assign(lv, port_ident, child, child_res, false);
      }
      comb.push_back(std::move(p));
    }
  }

  void collect_access(std::uint32_t s, Process& p) const {
    const Stmt& st = m_.stmts_[s];
    switch (st.kind) {
      case Stmt::Kind::Block:
        for (auto c : st.children) collect_access(c, p);
        break;
      case Stmt::Kind::If:
        m_.program_.reads(st.expr, p.reads);
        collect_access(static_cast<std::uint32_t>(st.then_s), p);
        if (st.else_s >= 0) collect_access(static_cast<std::uint32_t>(st.else_s), p);
        break;
      case Stmt::Kind::Case:
        m_.program_.reads(st.expr, p.reads);
        for (const auto& arm : st.arms) {
          for (const auto& l : arm.labels) m_.program_.reads(l.expr, p.reads);
          collect_access(arm.body, p);
        }
        break;
      case Stmt::Kind::Assign: {
        m_.program_.reads(st.expr, p.reads);
        for (const auto& part : m_.lvalues_[st.lvalue].parts) {
          if (part.dyn_word) {
            m_.program_.reads(part.word_expr, p.reads);
            for (std::int64_t w = 0; w < part.array_size; ++w) {
              p.writes.emplace_back(part.slot + static_cast<std::uint32_t>(w), ~0ULL);
            }
          } else if (part.slot != UINT32_MAX) {
            std::uint64_t m = ~0ULL;
            if (part.bits == LvPart::Bits::Const) {
              m = part.low >= 0 ? (part.low >= 64 ? 0 : mask_of(part.width) << part.low)
                                : (-part.low >= 64 ? 0 : mask_of(part.width) >> -part.low);
            }
            p.writes.emplace_back(part.slot, m);
          }
          if (part.bits == LvPart::Bits::Dyn) m_.program_.reads(part.low_expr, p.reads);
        }
        break;
      }
      case Stmt::Kind::Null:
        break;
    }
  }

  void schedule(std::vector<Process> comb) {
    const std::size_t n = comb.size();
    for (auto& p : comb) collect_access(p.body, p);
    std::map<std::uint32_t, std::vector<std::pair<std::size_t, std::uint64_t>>> writers;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [slot, m] : comb[i].writes) writers[slot].emplace_back(i, m);
    }
    std::vector<std::set<std::size_t>> succ(n);
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t q = 0; q < n; ++q) {
      for (const auto& [slot, m] : comb[q].reads) {
        auto it = writers.find(slot);
        if (it == writers.end()) continue;
        for (const auto& [p, wm] : it->second) {
          if (p != q && (wm & m) && succ[p].insert(q).second) ++indeg[q];
        }
      }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
      if (indeg[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      const auto p = ready.top();
      ready.pop();
      order.push_back(p);
      for (auto q : succ[p]) {
        if (--indeg[q] == 0) ready.push(q);
      }
    }
    if (order.size() != n) throw CombinationalLoop("combinational loop: " + describe_cycle(comb, succ, indeg));
    for (auto i : order) m_.comb_.push_back(std::move(comb[i]));
  }

  std::string slot_name(std::uint32_t slot) const {
    for (const auto& v : m_.vars_) {
      const auto span = v.is_array ? static_cast<std::uint32_t>(v.array_size) : 1u;
      if (slot >= v.slot && slot < v.slot + span) return v.name;
    }
    return "?";
  }

  std::string describe_cycle(const std::vector<Process>& comb, const std::vector<std::set<std::size_t>>& succ,
                             const std::vector<std::size_t>& indeg) const {
    // Walk successors among unscheduled processes until a repeat.
    std::size_t cur = 0;
    while (indeg[cur] == 0) ++cur;
    std::vector<std::size_t> path;
    std::map<std::size_t, std::size_t> pos;
    while (!pos.count(cur)) {
      pos[cur] = path.size();
      path.push_back(cur);
      for (auto q : succ[cur]) {
        if (indeg[q] != 0) {
          cur = q;
          break;
        }
      }
    }
    std::string out;
    for (std::size_t i = pos[cur]; i < path.size(); ++i) {
      const auto& p = comb[path[i]];
      out += (p.writes.empty() ? p.origin : slot_name(p.writes.front().first)) + " -> ";
    }
    const auto& first = comb[cur];
    out += first.writes.empty() ? first.origin : slot_name(first.writes.front().first);
    return out;
  }

  void classify_inputs() {
    const auto graph = elab::build_connectivity(d_);
    const auto cr = elab::classify_clock_reset(d_, graph);
    const Instance& top = d_.instances.front();
    for (const auto& port : top.port_order) {
      const auto& s = top.signals.at(port);
      if (s.direction != elab::Direction::Input) continue;
      const Var& v = var_of(top, port);
      InputPort in{port, v.slot, v.width, InputRole::Data};
      if (cr.clocks.count(port)) {
        in.role = InputRole::Clock;
      } else if (auto r = cr.resets.find(port); r != cr.resets.end()) {
        in.role = r->second ? InputRole::ResetLow : InputRole::ResetHigh;
      }
      m_.inputs_.push_back(in);
    }
  }

  const elab::Design& d_;
  Model& m_;
  std::map<std::string, std::size_t> var_index_;
  std::size_t delays_ = 0;
};

Model Model::compile(const elab::Design& design) {
  Model m;
  ModelBuilder(design, m).run();
  return m;
}

}  // namespace rtlmut::sim
