#include "rtlmut/hdl/transform.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace rtlmut::hdl {

namespace {

bool is_constant_expr(const Node& e) {
  bool constant = true;
  walk(e, [&](const Node& n, const NodePath&) {
    if (n.kind == NodeKind::Ident || n.kind == NodeKind::SysCall) constant = false;
  });
  return constant;
}

void sanitize_module(Node& module) {
  // reg name -> (item index, declarator index) for declarators lacking an initializer
  std::map<std::string, std::pair<std::size_t, std::size_t>> bare_regs;
  for (std::size_t i = 2; i < module.children.size(); ++i) {
    const Node& item = module.children[i];
    if (item.kind != NodeKind::NetDecl || item.children[0].text != "reg") continue;
    for (std::size_t d = 1; d < item.children.size(); ++d) {
      const Node& decl = item.children[d];
      if (decl.children[0].empty() && decl.children[1].empty()) bare_regs.emplace(decl.text, std::pair{i, d});
    }
  }
  if (bare_regs.empty()) return;

  std::vector<std::size_t> lowered;
  for (std::size_t i = 2; i < module.children.size(); ++i) {
    Node& item = module.children[i];
    if (item.kind != NodeKind::ContinuousAssign || !item.children[0].empty()) continue;
    const Node& lhs = item.children[1];
    if (lhs.kind != NodeKind::Ident || !is_constant_expr(item.children[2])) continue;
    auto it = bare_regs.find(lhs.text);
    if (it == bare_regs.end()) continue;
    auto [decl_item, decl_idx] = it->second;
    module.children[decl_item].children[decl_idx].children[1] = item.children[2];
    bare_regs.erase(it);
    lowered.push_back(i);
  }
  for (auto it = lowered.rbegin(); it != lowered.rend(); ++it) {
    module.children.erase(module.children.begin() + static_cast<std::ptrdiff_t>(*it));
  }
}

bool same_header(const Node& a, const Node& b) { return a.kind == b.kind && a.text == b.text && a.aux == b.aux; }

void diff_rec(const Node& g, const Node& m, NodePath& path, std::vector<DiffSite>& out);

// Finds a single insertion (longer = mutant) or deletion (longer = golden)
// that aligns the two child lists. Returns the index in the longer list.
std::optional<std::size_t> single_gap(const std::vector<Node>& shorter, const std::vector<Node>& longer) {
  std::size_t prefix = 0;
  while (prefix < shorter.size() && structurally_equal(shorter[prefix], longer[prefix])) ++prefix;
  std::size_t suffix = 0;
  while (suffix < shorter.size() - prefix &&
         structurally_equal(shorter[shorter.size() - 1 - suffix], longer[longer.size() - 1 - suffix])) {
    ++suffix;
  }
  if (prefix + suffix >= shorter.size()) return prefix;
  return std::nullopt;
}

void diff_children(const Node& g, const Node& m, NodePath& path, std::vector<DiffSite>& out) {
  const auto n = g.children.size();
  std::vector<std::vector<DiffSite>> per_child(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    path.push_back(i);
    diff_rec(g.children[i], m.children[i], path, per_child[i]);
    path.pop_back();
  }

  // Merge exchanged pairs: the subtree holding all of child i's differences
  // in the golden tree equals child j's in the mutant and vice versa.
  std::vector<NodePath> roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (per_child[i].empty()) continue;
    for (std::size_t k = 0; k < per_child[i].size(); ++k) {
      NodePath p = per_child[i][k].path;
      if (per_child[i][k].kind != EditKind::Replace) p.pop_back();
      if (k == 0) {
        roots[i] = p;
        continue;
      }
      std::size_t c = 0;
      while (c < p.size() && c < roots[i].size() && p[c] == roots[i][c]) ++c;
      roots[i].resize(c);
    }
  }
  std::vector<bool> merged(n, false);
  bool any_swap = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (merged[i] || per_child[i].empty()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (merged[j] || per_child[j].empty()) continue;
      const auto ri = std::span(roots[i]).subspan(path.size());
      const auto rj = std::span(roots[j]).subspan(path.size());
      const Node* gi = node_at(g, ri);
      const Node* mi = node_at(m, ri);
      const Node* gj = node_at(g, rj);
      const Node* mj = node_at(m, rj);
      if (gi && mi && gj && mj && structurally_equal(*gi, *mj) && structurally_equal(*gj, *mi)) {
        merged[i] = merged[j] = true;
        any_swap = true;
        break;
      }
    }
  }
  if (any_swap) {
    bool swap_emitted = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (merged[i]) {
        if (!swap_emitted) out.push_back({{}, path, EditKind::Replace});
        swap_emitted = true;
      } else {
        out.insert(out.end(), per_child[i].begin(), per_child[i].end());
      }
    }
    return;
  }
  for (auto& sites : per_child) out.insert(out.end(), sites.begin(), sites.end());
}

void diff_rec(const Node& g, const Node& m, NodePath& path, std::vector<DiffSite>& out) {
  if (!same_header(g, m)) {
    out.push_back({{}, path, EditKind::Replace});
    return;
  }
  const auto gs = g.children.size();
  const auto ms = m.children.size();
  // A part-select range is one unit: changed bounds are one site.
  if (g.kind == NodeKind::PartSelect && gs == 3 && ms == 3 && structurally_equal(g.child(0), m.child(0)) &&
      !(structurally_equal(g.child(1), m.child(1)) && structurally_equal(g.child(2), m.child(2)))) {
    out.push_back({{}, path, EditKind::Replace});
    return;
  }
  if (gs == ms) {
    diff_children(g, m, path, out);
    return;
  }
  if (ms == gs + 1) {
    if (auto k = single_gap(g.children, m.children)) {
      NodePath p = path;
      p.push_back(static_cast<std::uint32_t>(*k));
      out.push_back({{}, std::move(p), EditKind::Insert});
      return;
    }
  } else if (gs == ms + 1) {
    if (auto k = single_gap(m.children, g.children)) {
      NodePath p = path;
      p.push_back(static_cast<std::uint32_t>(*k));
      out.push_back({{}, std::move(p), EditKind::Delete});
      return;
    }
  }
  out.push_back({{}, path, EditKind::Replace});
}

std::set<std::string> module_names(const Node& root) {
  std::set<std::string> names;
  for (const auto& m : root.children) names.insert(m.text);
  return names;
}

// All siblings between indices a and b (inclusive) of `parent` are identical.
bool identical_run(const Node& parent, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  if (b >= parent.children.size()) return false;
  for (std::size_t i = a + 1; i <= b; ++i) {
    if (!structurally_equal(parent.children[a], parent.children[i])) return false;
  }
  return true;
}

}  // namespace

Node sanitize(const Node& ast) {
  Node out = ast;
  if (out.kind == NodeKind::SourceText) {
    for (auto& m : out.children) sanitize_module(m);
  } else if (out.kind == NodeKind::Module) {
    sanitize_module(out);
  }
  return out;
}

std::string_view edit_kind_name(EditKind kind) {
  switch (kind) {
    case EditKind::Replace: return "replace";
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
  }
  return "replace";
}

EditKind edit_kind_from_name(std::string_view name) {
  if (name == "insert") return EditKind::Insert;
  if (name == "delete") return EditKind::Delete;
  return EditKind::Replace;
}

std::vector<DiffSite> structural_diff(const Node& golden, const Node& mutant) {
  std::vector<DiffSite> out;
  NodePath path;
  diff_rec(golden, mutant, path, out);
  return out;
}

std::vector<DiffSite> structural_diff(const std::vector<FileTree>& golden, const std::vector<FileTree>& mutant) {
  if (golden.size() != mutant.size()) throw HierarchyMismatch("file count differs");
  std::set<std::string> gmods, mmods;
  for (const auto& f : golden) {
    auto s = module_names(*f.root);
    gmods.insert(s.begin(), s.end());
  }
  for (const auto& f : mutant) {
    auto s = module_names(*f.root);
    mmods.insert(s.begin(), s.end());
  }
  if (gmods != mmods) throw HierarchyMismatch("module sets differ");

  std::vector<DiffSite> out;
  for (std::size_t i = 0; i < golden.size(); ++i) {
    if (golden[i].file != mutant[i].file) throw HierarchyMismatch("file lists differ: " + golden[i].file);
    for (auto& site : structural_diff(*golden[i].root, *mutant[i].root)) {
      site.file = golden[i].file;
      out.push_back(std::move(site));
    }
  }
  return out;
}

DiffSite EditRecord::expected_site() const {
  DiffSite site{file, path, kind};
  if (kind == EditKind::Insert && !site.path.empty()) site.path.back() += 1;
  return site;
}

bool site_matches(const EditRecord& edit, const DiffSite& site, const Node& golden_root, const Node& mutant_root) {
  const DiffSite expected = edit.expected_site();
  if (site.kind != expected.kind || site.file != expected.file) return false;
  if (site.path == expected.path) return true;
  if (site.kind == EditKind::Replace || site.path.size() != expected.path.size() || site.path.empty()) return false;
  const std::span parent_path(site.path.data(), site.path.size() - 1);
  if (!std::equal(parent_path.begin(), parent_path.end(), expected.path.begin())) return false;
  const Node& root = site.kind == EditKind::Delete ? golden_root : mutant_root;
  const Node* parent = node_at(root, parent_path);
  return parent && identical_run(*parent, site.path.back(), expected.path.back());
}

}  // namespace rtlmut::hdl
