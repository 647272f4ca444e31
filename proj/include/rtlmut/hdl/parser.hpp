#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtlmut/hdl/ast.hpp"
#include "rtlmut/hdl/lexer.hpp"
#include "rtlmut/hdl/source.hpp"

namespace rtlmut::hdl {

/// Recursive-descent parser for the supported Verilog-2005 subset.
///
/// The expression entry point is public so that other front ends (the
/// assertion reader) can share operator precedence and literal handling.
class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file, bool allow_hierarchical_names = false);

  /// Parses a complete file into a SourceText node with ids assigned.
  Node parse_source();
  Node parse_expression();

  const Token& peek(std::size_t ahead = 0) const;
  const Token& advance();
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool is_symbol(std::string_view sym, std::size_t ahead = 0) const;
  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const;
  bool accept(std::string_view sym);
  const Token& expect(std::string_view sym);
  std::string expect_identifier();
  [[noreturn]] void fail(std::vector<std::string> expected) const;
  [[noreturn]] void unsupported(const Token& at, std::string construct) const;

 private:
  Node parse_module();
  void parse_param_ports(Node& module);
  void parse_ports(Node& module);
  void parse_module_item(Node& module);
  Node parse_data_type(bool allow_kind);
  Node parse_range();
  Node parse_declarator(bool allow_unpacked, bool allow_init);
  Node parse_decl_body(NodeKind kind, std::string aux, Node type, bool allow_unpacked, bool allow_init);
  void parse_continuous_assign(Node& module);
  Node parse_always();
  Node parse_event_control();
  Node parse_instantiation();
  Node parse_connection(bool allow_named_empty);
  Node parse_statement();
  Node parse_case();
  Node parse_lvalue();
  Node parse_delay();

  Node parse_ternary();
  Node parse_binary(int level);
  Node parse_unary();
  Node parse_primary();
  Node parse_postfix(Node base);
  Node parse_concat();

  Node make(NodeKind kind, const Token& start, std::string text = {}, std::string aux = {}) const;
  void close(Node& node) const;

  std::vector<Token> tokens_;
  std::string file_;
  bool hierarchical_;
  std::size_t pos_ = 0;
};

/// Parses `file`; throws SyntaxError or UnsupportedConstruct.
Node parse(const SourceFile& file);
Node parse_text(std::string path, std::string text);

/// Parses a standalone expression (used by tests and the assertion reader).
Node parse_expression_text(std::string_view text);

}  // namespace rtlmut::hdl
