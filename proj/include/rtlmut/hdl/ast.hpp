#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtlmut::hdl {

struct Span {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_col = 0;
};

// Child layout per kind (positional; absent optionals are Empty nodes):
//
//   SourceText        modules...
//   Module            text=name aux="ansi"|""   [ParamPorts, Ports, item...]
//   ParamPorts        ParamDecl...
//   Ports             PortDecl... (ansi) | PortRef... (text=name)
//   PortDecl          aux=direction             [DataType, Declarator...]
//   NetDecl                                     [DataType, Declarator...]
//   ParamDecl         aux=parameter|localparam  [DataType, Declarator...]
//   DataType          text=wire|reg|integer|"" aux="signed"|""  [Range]?
//   Range                                       [msb, lsb]
//   Declarator        text=name                 [Range|Empty, init|Empty]
//   ContinuousAssign                            [Delay|Empty, lhs, rhs]
//   Always                                      [EventControl, stmt]
//   EventControl      text="*" | ""             EventExpr...
//   EventExpr         aux=posedge|negedge|""    [expr]
//   Instantiation     text=module               [ParamArgs, InstanceItem...]
//   ParamArgs                                   Connection...
//   InstanceItem      text=instance             Connection...
//   Connection        text=port ("" positional) [expr|Empty]
//   Block             text=label                stmt...
//   If                                          [cond, then, else|Empty]
//   Case              aux=case|casez|casex      [expr, CaseItem...]
//   CaseItem          text="default"|""         [label..., stmt]
//   BlockingAssign                              [lhs, rhs]
//   NonblockingAssign                           [lhs, rhs]
//   DelayStmt                                   [Delay, stmt]
//   Delay                                       [expr]
//   Ident             text=name (dotted for hierarchical references)
//   Number            text=literal as written
//   Unary / Binary    text=operator             [operand] / [lhs, rhs]
//   Ternary                                     [cond, then, else]
//   Concat                                      items...
//   Replicate                                   [count, Concat]
//   BitSelect                                   [base, index]
//   PartSelect        text=":"|"+:"|"-:"        [base, left, right]
//   SysCall           text="$name"              args...
enum class NodeKind : std::uint8_t {
  Empty,
  SourceText,
  Module,
  ParamPorts,
  Ports,
  PortRef,
  PortDecl,
  NetDecl,
  ParamDecl,
  DataType,
  Range,
  Declarator,
  ContinuousAssign,
  Always,
  EventControl,
  EventExpr,
  Instantiation,
  ParamArgs,
  InstanceItem,
  Connection,
  Block,
  If,
  Case,
  CaseItem,
  BlockingAssign,
  NonblockingAssign,
  DelayStmt,
  Delay,
  NullStmt,
  Ident,
  Number,
  Unary,
  Binary,
  Ternary,
  Concat,
  Replicate,
  BitSelect,
  PartSelect,
  SysCall,
};

std::string_view kind_name(NodeKind kind);

bool is_statement(NodeKind kind);
bool is_expression(NodeKind kind);

struct Node {
  NodeKind kind = NodeKind::Empty;
  std::string text;
  std::string aux;
  std::vector<Node> children;
  Span span;
  std::uint32_t id = 0;

  Node() = default;
  explicit Node(NodeKind k, std::string t = {}, std::string a = {})
      : kind(k), text(std::move(t)), aux(std::move(a)) {}

  bool empty() const { return kind == NodeKind::Empty; }
  const Node& child(std::size_t i) const { return children.at(i); }
  Node& child(std::size_t i) { return children.at(i); }
};

/// Child-index sequence from a root to a node.
using NodePath = std::vector<std::uint32_t>;

std::string path_to_string(std::span<const std::uint32_t> path);
NodePath path_from_string(std::string_view text);
bool is_prefix(std::span<const std::uint32_t> prefix, std::span<const std::uint32_t> path);

/// Structural equality ignores spans and ids.
bool structurally_equal(const Node& a, const Node& b);

const Node* node_at(const Node& root, std::span<const std::uint32_t> path);
Node* node_at(Node& root, std::span<const std::uint32_t> path);

/// Renumbers ids in preorder starting at 0.
void assign_ids(Node& root);

/// Preorder walk; the callback receives each node with its path from root.
void walk(const Node& root,
          const std::function<void(const Node&, const NodePath&)>& visit);

/// Identifier names referenced anywhere under `expr`, in first-seen order.
std::vector<std::string> collect_identifiers(const Node& expr);

std::size_t count_nodes(const Node& root);

}  // namespace rtlmut::hdl
