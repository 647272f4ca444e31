#include "rtlmut/elab/design.hpp"

#include <algorithm>
#include <set>

#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/util/kv.hpp"

namespace rtlmut::elab {

using hdl::Node;
using hdl::NodeKind;
using hdl::NodePath;

const Node& Design::module_node(const std::string& name) const {
  const auto& ref = modules.at(name);
  return files[ref.file].ast->child(ref.index);
}

const DesignFile& Design::module_file(const std::string& name) const { return files[modules.at(name).file]; }

std::size_t Design::file_index(const std::string& path) const {
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files[i].path == path) return i;
  }
  throw ElabError("no file '" + path + "' in design");
}

const Instance& Design::first_instance(const std::string& module) const {
  for (const auto& inst : instances) {
    if (inst.module == module) return inst;
  }
  throw ElabError("module '" + module + "' is not instantiated");
}

const Instance* Design::find_instance(const std::string& path) const {
  for (const auto& inst : instances) {
    if (inst.path == path) return &inst;
  }
  return nullptr;
}

std::size_t count_loc(const std::vector<DesignFile>& files) {
  std::size_t n = 0;
  for (const auto& f : files) n += f.source.non_blank_lines();
  return n;
}

namespace {

struct Override {
  std::string name;  // empty for positional
  std::int64_t value;
};

std::int64_t truncate_param(std::int64_t v, const Node& type, const ParamEnv& env) {
  if (type.text == "integer") return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
  if (type.children.empty()) return v;
  const Node& range = type.child(0);
  const auto msb = eval_const(range.child(0), env);
  const auto lsb = eval_const(range.child(1), env);
  const auto width = (msb >= lsb ? msb - lsb : lsb - msb) + 1;
  if (width >= 64) return v;
  const auto masked = static_cast<std::uint64_t>(v) & ((1ULL << width) - 1);
  return static_cast<std::int64_t>(masked);
}

class Elaborator {
 public:
  explicit Elaborator(Design& d) : d_(d) {}

  void index_modules() {
    for (std::size_t f = 0; f < d_.files.size(); ++f) {
      const Node& root = *d_.files[f].ast;
      for (std::uint32_t i = 0; i < root.children.size(); ++i) {
        const auto& name = root.child(i).text;
        if (!d_.modules.emplace(name, ModuleRef{f, i}).second) {
          throw ElabError("module '" + name + "' is defined more than once");
        }
      }
    }
  }

  std::string pick_top(const std::string& requested) {
    if (!requested.empty()) {
      if (!d_.modules.count(requested)) throw UnresolvedModule(requested);
      return requested;
    }
    std::set<std::string> used;
    for (const auto& [name, ref] : d_.modules) {
      for (const auto& item : d_.module_node(name).children) {
        if (item.kind == NodeKind::Instantiation) used.insert(item.text);
      }
    }
    std::vector<std::string> candidates;
    for (const auto& [name, ref] : d_.modules) {
      if (!used.count(name)) candidates.push_back(name);
    }
    if (candidates.empty()) throw CyclicHierarchy("no top candidate: every module is instantiated");
    if (candidates.size() > 1) {
      std::string list;
      for (const auto& c : candidates) list += (list.empty() ? "" : ", ") + c;
      throw MultipleTopCandidates("multiple top candidates: " + list);
    }
    return candidates.front();
  }

  void build(const std::string& module, const std::string& path, const std::string& name, int parent,
             const std::vector<Override>& overrides, NodePath item_path, std::vector<std::string>& stack) {
    if (std::find(stack.begin(), stack.end(), module) != stack.end()) {
      std::string cycle;
      for (const auto& s : stack) cycle += s + " -> ";
      throw CyclicHierarchy("cyclic hierarchy: " + cycle + module);
    }
    if (!d_.modules.count(module)) throw UnresolvedModule(module);
    stack.push_back(module);

    const Node& mod = d_.module_node(module);
    const std::string& file = d_.module_file(module).path;
    Instance inst;
    inst.path = path;
    inst.name = name;
    inst.module = module;
    inst.parent = parent;
    inst.item_path = std::move(item_path);
    bind_params(inst, mod, file, overrides);
    declare_signals(inst, mod, file);
    check_body(inst, mod, file);

    const int self = static_cast<int>(d_.instances.size());
    d_.instances.push_back(inst);
    if (parent >= 0) d_.instances[parent].children.push_back(self);

    const auto mod_index = d_.modules.at(module).index;
    for (std::uint32_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      if (item.kind != NodeKind::Instantiation) continue;
      if (!d_.modules.count(item.text)) throw UnresolvedModule(item.text);
      std::vector<Override> child_overrides;
      for (const auto& conn : item.child(0).children) {
        try {
          child_overrides.push_back({conn.text, eval_const(conn.child(0), d_.instances[self].params)});
        } catch (const NotConstant& e) {
          throw ParameterNotConstant(site(file, conn) + ": parameter override is not constant: " + e.what());
        }
      }
      for (std::uint32_t j = 1; j < item.children.size(); ++j) {
        const Node& ii = item.child(j);
        const std::string child_path = path.empty() ? ii.text : path + "." + ii.text;
        build(item.text, child_path, ii.text, self, child_overrides, NodePath{mod_index, i, j}, stack);
      }
    }
    stack.pop_back();
  }

 private:
  static std::string site(const std::string& file, const Node& n) {
    return file + ":" + std::to_string(n.span.line) + ":" + std::to_string(n.span.col);
  }

  void bind_params(Instance& inst, const Node& mod, const std::string& file, const std::vector<Override>& overrides) {
    std::vector<const Node*> overridable;
    std::vector<std::pair<const Node*, const Node*>> decls;  // (ParamDecl, Declarator)
    auto collect = [&](const Node& pd) {
      for (std::size_t k = 1; k < pd.children.size(); ++k) {
        decls.emplace_back(&pd, &pd.child(k));
        if (pd.aux == "parameter") overridable.push_back(&pd.child(k));
      }
    };
    for (const auto& pd : mod.child(0).children) collect(pd);
    for (std::size_t i = 2; i < mod.children.size(); ++i) {
      if (mod.child(i).kind == NodeKind::ParamDecl) collect(mod.child(i));
    }

    std::map<std::string, std::int64_t> given;
    std::size_t positional = 0;
    for (const auto& o : overrides) {
      if (o.name.empty()) {
        if (positional >= overridable.size()) {
          throw ElabError("too many parameter overrides for module '" + inst.module + "'");
        }
        given[overridable[positional++]->text] = o.value;
      } else {
        const bool known = std::any_of(overridable.begin(), overridable.end(),
                                       [&](const Node* d) { return d->text == o.name; });
        if (!known) throw ElabError("module '" + inst.module + "' has no parameter '" + o.name + "'");
        given[o.name] = o.value;
      }
    }

    for (const auto& [pd, decl] : decls) {
      std::int64_t value = 0;
      auto it = given.find(decl->text);
      try {
        if (it != given.end() && pd->aux == "parameter") {
          value = it->second;
        } else {
          if (decl->child(1).empty()) throw NotConstant("parameter without value");
          value = eval_const(decl->child(1), inst.params);
        }
        value = truncate_param(value, pd->child(0), inst.params);
      } catch (const NotConstant& e) {
        throw ParameterNotConstant(site(file, *decl) + ": parameter '" + decl->text + "': " + e.what());
      }
      if (!inst.params.emplace(decl->text, value).second) {
        throw ElabError(site(file, *decl) + ": duplicate parameter '" + decl->text + "'");
      }
    }
  }

  std::pair<std::int64_t, std::int64_t> eval_range(const Node& range, const Instance& inst, const std::string& file) {
    try {
      return {eval_const(range.child(0), inst.params), eval_const(range.child(1), inst.params)};
    } catch (const NotConstant& e) {
      throw ParameterNotConstant(site(file, range) + ": range is not constant: " + e.what());
    }
  }

  void add_decl(Instance& inst, const Node& item, Direction dir, const std::string& file) {
    const Node& type = item.child(0);
    for (std::size_t k = 1; k < item.children.size(); ++k) {
      const Node& decl = item.child(k);
      Signal s;
      s.name = decl.text;
      s.direction = dir;
      s.is_reg = type.text == "reg" || type.text == "integer";
      s.is_signed = type.aux == "signed" || type.text == "integer";
      if (type.text == "integer") {
        s.msb = 31;
        s.lsb = 0;
      } else if (!type.children.empty()) {
        std::tie(s.msb, s.lsb) = eval_range(type.child(0), inst, file);
      }
      if (!decl.child(0).empty()) {
        auto [a, b] = eval_range(decl.child(0), inst, file);
        s.is_array = true;
        s.array_lo = std::min(a, b);
        s.array_hi = std::max(a, b);
      }
      if (!decl.child(1).empty()) s.init = &decl.child(1);
      if (inst.params.count(s.name)) throw ElabError(site(file, decl) + ": '" + s.name + "' is already a parameter");

      auto it = inst.signals.find(s.name);
      if (it == inst.signals.end()) {
        inst.signals.emplace(s.name, s);
        continue;
      }
      // Non-ANSI style: `output [3:0] q;` followed by `reg [3:0] q;`.
      Signal& prev = it->second;
      const bool merges = (prev.direction != Direction::None) != (dir != Direction::None) && !prev.is_array &&
                          !s.is_array && prev.msb == s.msb && prev.lsb == s.lsb;
      if (!merges) throw ElabError(site(file, decl) + ": duplicate declaration of '" + s.name + "'");
      prev.is_reg = prev.is_reg || s.is_reg;
      if (prev.direction == Direction::None) prev.direction = dir;
      if (!prev.init) prev.init = s.init;
    }
  }

  static Direction direction_of(const Node& port_decl, const std::string& file) {
    if (port_decl.aux == "input") return Direction::Input;
    if (port_decl.aux == "output") return Direction::Output;
    throw ElabError(site(file, port_decl) + ": inout ports are not supported");
  }

  void declare_signals(Instance& inst, const Node& mod, const std::string& file) {
    const Node& ports = mod.child(1);
    for (const auto& p : ports.children) {
      if (p.kind == NodeKind::PortDecl) {
        add_decl(inst, p, direction_of(p, file), file);
        for (std::size_t k = 1; k < p.children.size(); ++k) inst.port_order.push_back(p.child(k).text);
      } else {
        inst.port_order.push_back(p.text);
      }
    }
    for (std::size_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      if (item.kind == NodeKind::PortDecl) {
        if (mod.aux == "ansi") throw ElabError(site(file, item) + ": port declaration in ANSI-style module");
        add_decl(inst, item, direction_of(item, file), file);
      } else if (item.kind == NodeKind::NetDecl) {
        add_decl(inst, item, Direction::None, file);
      }
    }
    std::set<std::string> seen;
    for (const auto& p : inst.port_order) {
      if (!seen.insert(p).second) throw ElabError(file + ": port '" + p + "' listed twice in module '" + inst.module + "'");
      auto it = inst.signals.find(p);
      if (it == inst.signals.end() || it->second.direction == Direction::None) {
        throw ElabError(file + ": port '" + p + "' of module '" + inst.module + "' has no direction declaration");
      }
    }
    for (const auto& [name, s] : inst.signals) {
      if (s.direction != Direction::None && !seen.count(name)) {
        throw ElabError(file + ": '" + name + "' declared as a port but missing from the port list");
      }
    }
  }

  void check_expr(const Node& e, const Instance& inst, const std::string& file) {
    hdl::walk(e, [&](const Node& n, const NodePath&) {
      if (n.kind == NodeKind::Ident) {
        if (!inst.signals.count(n.text) && !inst.params.count(n.text)) {
          throw ElabError(site(file, n) + ": undeclared identifier '" + n.text + "'");
        }
      } else if (n.kind == NodeKind::SysCall && n.text != "$clog2" && n.text != "$unsigned") {
        throw ElabError(site(file, n) + ": unsupported system function " + n.text);
      }
    });
  }

  // Validates an assignment target and returns nothing; `procedural`
  // selects whether the base must be a variable or a net.
  void check_lvalue(const Node& lv, const Instance& inst, const std::string& file, bool procedural) {
    if (lv.kind == NodeKind::Concat) {
      for (const auto& c : lv.children) check_lvalue(c, inst, file, procedural);
      return;
    }
    const Node* base = &lv;
    while (base->kind == NodeKind::BitSelect || base->kind == NodeKind::PartSelect) {
      for (std::size_t k = 1; k < base->children.size(); ++k) check_expr(base->child(k), inst, file);
      base = &base->child(0);
    }
    if (base->kind != NodeKind::Ident) throw ElabError(site(file, lv) + ": invalid assignment target");
    auto it = inst.signals.find(base->text);
    if (it == inst.signals.end()) throw ElabError(site(file, *base) + ": undeclared identifier '" + base->text + "'");
    const Signal& s = it->second;
    if (s.direction == Direction::Input) throw ElabError(site(file, *base) + ": assignment to input '" + s.name + "'");
    if (procedural && !s.is_reg) {
      throw ElabError(site(file, *base) + ": procedural assignment to net '" + s.name + "'");
    }
    if (!procedural && s.is_reg) {
      throw ElabError(site(file, *base) + ": continuous assignment to variable '" + s.name + "'");
    }
    if (s.is_array && lv.kind != NodeKind::BitSelect && base == &lv) {
      throw ElabError(site(file, lv) + ": whole-array assignment to '" + s.name + "'");
    }
  }

  void check_stmt(const Node& st, const Instance& inst, const std::string& file) {
    switch (st.kind) {
      case NodeKind::Block:
        for (const auto& c : st.children) check_stmt(c, inst, file);
        break;
      case NodeKind::If:
        check_expr(st.child(0), inst, file);
        check_stmt(st.child(1), inst, file);
        if (!st.child(2).empty()) check_stmt(st.child(2), inst, file);
        break;
      case NodeKind::Case:
        check_expr(st.child(0), inst, file);
        for (std::size_t k = 1; k < st.children.size(); ++k) {
          const Node& ci = st.child(k);
          for (std::size_t l = 0; l + 1 < ci.children.size(); ++l) check_expr(ci.child(l), inst, file);
          check_stmt(ci.children.back(), inst, file);
        }
        break;
      case NodeKind::BlockingAssign:
      case NodeKind::NonblockingAssign:
        check_lvalue(st.child(0), inst, file, true);
        check_expr(st.child(1), inst, file);
        break;
      case NodeKind::DelayStmt:
        check_stmt(st.child(1), inst, file);
        break;
      case NodeKind::NullStmt:
      case NodeKind::Empty:
        break;
      default:
        throw ElabError(site(file, st) + ": unexpected statement");
    }
  }

  void check_instance(const Node& item, const Instance& inst, const std::string& file) {
    auto mref = d_.modules.find(item.text);
    if (mref == d_.modules.end()) throw UnresolvedModule(item.text);
    const Node& child_mod = d_.module_node(item.text);
    // Port directions only; widths are checked per instance when built.
    std::vector<std::string> port_names;
    std::map<std::string, std::string> port_dir;
    for (const auto& p : child_mod.child(1).children) {
      if (p.kind == NodeKind::PortDecl) {
        for (std::size_t k = 1; k < p.children.size(); ++k) {
          port_names.push_back(p.child(k).text);
          port_dir[p.child(k).text] = p.aux;
        }
      } else {
        port_names.push_back(p.text);
      }
    }
    for (std::size_t i = 2; i < child_mod.children.size(); ++i) {
      const Node& ci = child_mod.child(i);
      if (ci.kind != NodeKind::PortDecl) continue;
      for (std::size_t k = 1; k < ci.children.size(); ++k) port_dir[ci.child(k).text] = ci.aux;
    }

    for (std::size_t j = 1; j < item.children.size(); ++j) {
      const Node& ii = item.child(j);
      std::set<std::string> bound;
      bool named = false, positional = false;
      for (std::size_t c = 0; c < ii.children.size(); ++c) {
        const Node& conn = ii.child(c);
        std::string port;
        if (conn.text.empty()) {
          positional = true;
          if (c >= port_names.size()) throw ElabError(site(file, conn) + ": too many port connections");
          port = port_names[c];
        } else {
          named = true;
          port = conn.text;
          if (!port_dir.count(port)) {
            throw ElabError(site(file, conn) + ": module '" + item.text + "' has no port '" + port + "'");
          }
        }
        if (!bound.insert(port).second) throw ElabError(site(file, conn) + ": port '" + port + "' connected twice");
        if (conn.child(0).empty()) continue;
        if (port_dir[port] == "output") {
          check_lvalue(conn.child(0), inst, file, false);
        } else {
          check_expr(conn.child(0), inst, file);
        }
      }
      if (named && positional) throw ElabError(site(file, ii) + ": mixed named and positional connections");
    }
  }

  void check_body(const Instance& inst, const Node& mod, const std::string& file) {
    for (std::size_t i = 2; i < mod.children.size(); ++i) {
      const Node& item = mod.child(i);
      switch (item.kind) {
        case NodeKind::NetDecl:
          for (std::size_t k = 1; k < item.children.size(); ++k) {
            const Node& decl = item.child(k);
            if (decl.child(1).empty()) continue;
            check_expr(decl.child(1), inst, file);
            if (inst.signals.at(decl.text).is_array) {
              throw ElabError(site(file, decl) + ": initializer on array '" + decl.text + "'");
            }
            if (item.child(0).text == "reg" || item.child(0).text == "integer") {
              try {
                eval_const(decl.child(1), inst.params);
              } catch (const NotConstant& e) {
                throw ParameterNotConstant(site(file, decl) + ": variable initializer is not constant");
              }
            }
          }
          break;
        case NodeKind::ContinuousAssign:
          check_lvalue(item.child(1), inst, file, false);
          check_expr(item.child(2), inst, file);
          break;
        case NodeKind::Always:
          for (const auto& ev : item.child(0).children) check_expr(ev.child(0), inst, file);
          check_stmt(item.child(1), inst, file);
          break;
        case NodeKind::Instantiation:
          check_instance(item, inst, file);
          break;
        default:
          break;
      }
    }
  }

  Design& d_;
};

// Port widths must agree between the parent expression base and the child
// port when the connection is a bare identifier.
void check_port_widths(const Design& d) {
  for (const auto& inst : d.instances) {
    if (inst.parent < 0) continue;
    const Instance& parent = d.instances[inst.parent];
    const Node& mod = d.module_node(parent.module);
    const Node& item = mod.child(inst.item_path[1]).child(inst.item_path[2]);
    for (std::size_t c = 0; c < item.children.size(); ++c) {
      const Node& conn = item.child(c);
      const std::string port = conn.text.empty() ? inst.port_order.at(c) : conn.text;
      if (conn.child(0).kind != NodeKind::Ident) continue;
      const auto it = parent.signals.find(conn.child(0).text);
      if (it == parent.signals.end()) continue;
      const Signal& outer = it->second;
      const Signal& inner = inst.signals.at(port);
      if (outer.is_array) {
        throw ElabError(d.module_file(parent.module).path + ": array '" + outer.name + "' connected to a port");
      }
      if (outer.width() != inner.width()) {
        throw ElabError(d.module_file(parent.module).path + ":" + std::to_string(conn.span.line) + ": width mismatch on port '" +
                        port + "' of instance '" + inst.path + "' (" + std::to_string(outer.width()) + " vs " +
                        std::to_string(inner.width()) + ")");
      }
    }
  }
}

}  // namespace

Design elaborate(std::vector<DesignFile> files, const std::string& top, std::string id) {
  Design d;
  d.id = std::move(id);
  d.files = std::move(files);
  Elaborator e(d);
  e.index_modules();
  d.top = e.pick_top(top);
  std::vector<std::string> stack;
  e.build(d.top, "", d.top, -1, {}, {}, stack);
  check_port_widths(d);
  d.loc = count_loc(d.files);
  return d;
}

DesignFile make_design_file(std::string path, std::string text) {
  DesignFile f;
  f.source = hdl::SourceFile(path, std::move(text));
  f.path = std::move(path);
  f.ast = std::make_shared<const Node>(hdl::parse(f.source));
  return f;
}

std::vector<DesignFile> load_design_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ElabError("not a directory: " + dir.string());
  std::vector<std::string> rel;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".v") {
      rel.push_back(fs::relative(entry.path(), dir).generic_string());
    }
  }
  std::sort(rel.begin(), rel.end());
  if (rel.empty()) throw ElabError("no .v files in " + dir.string());
  std::vector<DesignFile> out;
  for (const auto& r : rel) out.push_back(make_design_file(r, util::read_file(dir / r)));
  return out;
}

Design rebuild(const Design& base, const std::map<std::string, std::string>& replaced_text) {
  std::vector<DesignFile> files;
  for (const auto& f : base.files) {
    auto it = replaced_text.find(f.path);
    files.push_back(it == replaced_text.end() ? f : make_design_file(f.path, it->second));
  }
  return elaborate(std::move(files), base.top, base.id);
}

}  // namespace rtlmut::elab
