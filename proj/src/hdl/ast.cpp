#include "rtlmut/hdl/ast.hpp"

#include <charconv>
#include <set>
#include <stdexcept>

namespace rtlmut::hdl {

std::string_view kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Empty: return "Empty";
    case NodeKind::SourceText: return "SourceText";
    case NodeKind::Module: return "Module";
    case NodeKind::ParamPorts: return "ParamPorts";
    case NodeKind::Ports: return "Ports";
    case NodeKind::PortRef: return "PortRef";
    case NodeKind::PortDecl: return "PortDecl";
    case NodeKind::NetDecl: return "NetDecl";
    case NodeKind::ParamDecl: return "ParamDecl";
    case NodeKind::DataType: return "DataType";
    case NodeKind::Range: return "Range";
    case NodeKind::Declarator: return "Declarator";
    case NodeKind::ContinuousAssign: return "ContinuousAssign";
    case NodeKind::Always: return "Always";
    case NodeKind::EventControl: return "EventControl";
    case NodeKind::EventExpr: return "EventExpr";
    case NodeKind::Instantiation: return "Instantiation";
    case NodeKind::ParamArgs: return "ParamArgs";
    case NodeKind::InstanceItem: return "InstanceItem";
    case NodeKind::Connection: return "Connection";
    case NodeKind::Block: return "Block";
    case NodeKind::If: return "If";
    case NodeKind::Case: return "Case";
    case NodeKind::CaseItem: return "CaseItem";
    case NodeKind::BlockingAssign: return "BlockingAssign";
    case NodeKind::NonblockingAssign: return "NonblockingAssign";
    case NodeKind::DelayStmt: return "DelayStmt";
    case NodeKind::Delay: return "Delay";
    case NodeKind::NullStmt: return "NullStmt";
    case NodeKind::Ident: return "Ident";
    case NodeKind::Number: return "Number";
    case NodeKind::Unary: return "Unary";
    case NodeKind::Binary: return "Binary";
    case NodeKind::Ternary: return "Ternary";
    case NodeKind::Concat: return "Concat";
    case NodeKind::Replicate: return "Replicate";
    case NodeKind::BitSelect: return "BitSelect";
    case NodeKind::PartSelect: return "PartSelect";
    case NodeKind::SysCall: return "SysCall";
  }
  return "?";
}

bool is_statement(NodeKind kind) {
  switch (kind) {
    case NodeKind::Block:
    case NodeKind::If:
    case NodeKind::Case:
    case NodeKind::BlockingAssign:
    case NodeKind::NonblockingAssign:
    case NodeKind::DelayStmt:
    case NodeKind::NullStmt:
      return true;
    default:
      return false;
  }
}

bool is_expression(NodeKind kind) {
  switch (kind) {
    case NodeKind::Ident:
    case NodeKind::Number:
    case NodeKind::Unary:
    case NodeKind::Binary:
    case NodeKind::Ternary:
    case NodeKind::Concat:
    case NodeKind::Replicate:
    case NodeKind::BitSelect:
    case NodeKind::PartSelect:
    case NodeKind::SysCall:
      return true;
    default:
      return false;
  }
}

std::string path_to_string(std::span<const std::uint32_t> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

NodePath path_from_string(std::string_view text) {
  NodePath path;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto dot = text.find('.', pos);
    if (dot == std::string_view::npos) dot = text.size();
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + dot, value);
    if (ec != std::errc{} || ptr != text.data() + dot) {
      throw std::invalid_argument("malformed node path: " + std::string(text));
    }
    path.push_back(value);
    pos = dot + 1;
  }
  return path;
}

bool is_prefix(std::span<const std::uint32_t> prefix, std::span<const std::uint32_t> path) {
  if (prefix.size() > path.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] != path[i]) return false;
  }
  return true;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.text != b.text || a.aux != b.aux || a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

const Node* node_at(const Node& root, std::span<const std::uint32_t> path) {
  const Node* cur = &root;
  for (auto idx : path) {
    if (idx >= cur->children.size()) return nullptr;
    cur = &cur->children[idx];
  }
  return cur;
}

Node* node_at(Node& root, std::span<const std::uint32_t> path) {
  return const_cast<Node*>(node_at(static_cast<const Node&>(root), path));
}

namespace {
void assign_ids_rec(Node& node, std::uint32_t& next) {
  node.id = next++;
  for (auto& c : node.children) assign_ids_rec(c, next);
}

void walk_rec(const Node& node, NodePath& path, const std::function<void(const Node&, const NodePath&)>& visit) {
  visit(node, path);
  for (std::uint32_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    walk_rec(node.children[i], path, visit);
    path.pop_back();
  }
}
}  // namespace

void assign_ids(Node& root) {
  std::uint32_t next = 0;
  assign_ids_rec(root, next);
}

void walk(const Node& root, const std::function<void(const Node&, const NodePath&)>& visit) {
  NodePath path;
  walk_rec(root, path, visit);
}

std::vector<std::string> collect_identifiers(const Node& expr) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  walk(expr, [&](const Node& n, const NodePath&) {
    if (n.kind == NodeKind::Ident && seen.insert(n.text).second) out.push_back(n.text);
  });
  return out;
}

std::size_t count_nodes(const Node& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += count_nodes(c);
  return n;
}

}  // namespace rtlmut::hdl
