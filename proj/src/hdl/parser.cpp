#include "rtlmut/hdl/parser.hpp"

#include <array>
#include <unordered_set>

namespace rtlmut::hdl {

namespace {

const std::unordered_set<std::string_view>& reserved_words() {
  static const std::unordered_set<std::string_view> words = {
      "module",   "endmodule", "input",     "output",    "inout",     "wire",       "reg",
      "integer",  "parameter", "localparam", "assign",   "always",    "begin",      "end",
      "if",       "else",      "case",      "casez",     "casex",     "endcase",    "default",
      "posedge",  "negedge",   "or",        "signed",    "initial",   "generate",   "endgenerate",
      "genvar",   "function",  "endfunction", "task",    "endtask",   "for",        "while",
      "repeat",   "forever",   "fork",      "join",      "defparam",  "specify",    "endspecify",
      "real",     "realtime",  "time",      "event",     "tri",       "wand",       "wor",
      "supply0",  "supply1",   "and",       "nand",      "nor",       "xor",        "xnor",
      "not",      "buf",       "bufif0",    "bufif1",    "notif0",    "notif1",     "logic",
      "always_ff", "always_comb", "always_latch", "interface", "wait", "disable", "primitive",
  };
  return words;
}

// Keywords that start a recognized construct outside the subset.
const std::unordered_set<std::string_view>& unsupported_items() {
  static const std::unordered_set<std::string_view> words = {
      "initial", "generate", "genvar", "function", "task", "defparam", "specify", "real", "realtime",
      "time",    "event",    "tri",    "wand",     "wor",  "supply0",  "supply1", "and", "nand",
      "nor",     "xor",      "xnor",   "not",      "buf",  "bufif0",   "bufif1",  "notif0", "notif1",
      "logic",   "always_ff", "always_comb", "always_latch", "interface", "for", "primitive",
  };
  return words;
}

struct BinaryLevel {
  std::array<std::string_view, 4> ops;
};

constexpr std::array<BinaryLevel, 11> kLevels = {{
    {{"||", "", "", ""}},
    {{"&&", "", "", ""}},
    {{"|", "", "", ""}},
    {{"^", "~^", "", ""}},
    {{"&", "", "", ""}},
    {{"==", "!=", "===", "!=="}},
    {{"<", "<=", ">", ">="}},
    {{"<<", ">>", "<<<", ">>>"}},
    {{"+", "-", "", ""}},
    {{"*", "/", "%", ""}},
    {{"**", "", "", ""}},
}};

constexpr std::array<std::string_view, 10> kUnaryOps = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^"};

}  // namespace

Parser::Parser(std::vector<Token> tokens, std::string file, bool allow_hierarchical_names)
    : tokens_(std::move(tokens)), file_(std::move(file)), hierarchical_(allow_hierarchical_names) {
  if (tokens_.empty() || tokens_.back().kind != TokenKind::End) tokens_.push_back(Token{});
}

const Token& Parser::peek(std::size_t ahead) const {
  const auto idx = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[idx];
}

const Token& Parser::advance() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool Parser::is_symbol(std::string_view sym, std::size_t ahead) const {
  const auto& t = peek(ahead);
  return t.kind == TokenKind::Symbol && t.text == sym;
}

bool Parser::is_keyword(std::string_view kw, std::size_t ahead) const {
  const auto& t = peek(ahead);
  return t.kind == TokenKind::Identifier && t.text == kw;
}

bool Parser::accept(std::string_view sym) {
  if (is_symbol(sym) || is_keyword(sym)) {
    advance();
    return true;
  }
  return false;
}

const Token& Parser::expect(std::string_view sym) {
  if (!is_symbol(sym) && !is_keyword(sym)) fail({std::string(sym)});
  return advance();
}

std::string Parser::expect_identifier() {
  const auto& t = peek();
  if (t.kind != TokenKind::Identifier || reserved_words().count(t.text)) fail({"identifier"});
  return advance().text;
}

void Parser::fail(std::vector<std::string> expected) const {
  const auto& t = peek();
  throw SyntaxError(file_, t.line, t.col, t.kind == TokenKind::End ? "end of file" : t.text, std::move(expected));
}

void Parser::unsupported(const Token& at, std::string construct) const {
  throw UnsupportedConstruct(file_, at.line, at.col, std::move(construct));
}

Node Parser::make(NodeKind kind, const Token& start, std::string text, std::string aux) const {
  Node n(kind, std::move(text), std::move(aux));
  n.span.line = start.line;
  n.span.col = start.col;
  n.span.end_line = start.end_line;
  n.span.end_col = start.end_col;
  return n;
}

void Parser::close(Node& node) const {
  if (pos_ == 0) return;
  const auto& last = tokens_[pos_ - 1];
  node.span.end_line = last.end_line;
  node.span.end_col = last.end_col;
}

Node Parser::parse_source() {
  Node root = make(NodeKind::SourceText, peek());
  while (!at_end()) {
    if (is_keyword("module")) {
      root.children.push_back(parse_module());
    } else if (peek().kind == TokenKind::Identifier && unsupported_items().count(peek().text)) {
      unsupported(peek(), peek().text);
    } else {
      fail({"module"});
    }
  }
  close(root);
  assign_ids(root);
  return root;
}

Node Parser::parse_module() {
  const Token& start = expect("module");
  Node module = make(NodeKind::Module, start, expect_identifier());
  module.children.push_back(make(NodeKind::ParamPorts, peek()));
  module.children.push_back(make(NodeKind::Ports, peek()));
  if (accept("#")) parse_param_ports(module);
  if (is_symbol("(")) parse_ports(module);
  expect(";");
  while (!is_keyword("endmodule")) {
    if (at_end()) fail({"endmodule"});
    parse_module_item(module);
  }
  expect("endmodule");
  close(module);
  return module;
}

void Parser::parse_param_ports(Node& module) {
  Node& params = module.children[0];
  expect("(");
  std::string keyword = "parameter";
  bool first = true;
  while (!is_symbol(")")) {
    if (!first) expect(",");
    first = false;
    const Token& start = peek();
    if (is_keyword("parameter") || is_keyword("localparam")) {
      keyword = advance().text;
      Node type = parse_data_type(true);
      params.children.push_back(parse_decl_body(NodeKind::ParamDecl, keyword, std::move(type), false, true));
      params.children.back().span.line = start.line;
      params.children.back().span.col = start.col;
    } else if (!params.children.empty()) {
      // Continuation of the previous declaration: #(parameter A = 1, B = 2).
      auto& prev = params.children.back();
      prev.children.push_back(parse_declarator(false, true));
      close(prev);
    } else {
      Node type = make(NodeKind::DataType, start);
      Node decl = make(NodeKind::ParamDecl, start, {}, keyword);
      decl.children.push_back(std::move(type));
      decl.children.push_back(parse_declarator(false, true));
      close(decl);
      params.children.push_back(std::move(decl));
    }
  }
  expect(")");
  close(params);
}

void Parser::parse_ports(Node& module) {
  Node& ports = module.children[1];
  expect("(");
  if (accept(")")) {
    module.aux = "ansi";
    close(ports);
    return;
  }
  const bool ansi = is_keyword("input") || is_keyword("output") || is_keyword("inout");
  if (ansi) {
    module.aux = "ansi";
    while (true) {
      if (is_keyword("input") || is_keyword("output") || is_keyword("inout")) {
        const Token& start = peek();
        std::string dir = advance().text;
        Node type = parse_data_type(true);
        Node decl = make(NodeKind::PortDecl, start, {}, dir);
        decl.children.push_back(std::move(type));
        decl.children.push_back(parse_declarator(false, false));
        close(decl);
        ports.children.push_back(std::move(decl));
      } else if (peek().kind == TokenKind::Identifier && !ports.children.empty()) {
        auto& prev = ports.children.back();
        prev.children.push_back(parse_declarator(false, false));
        close(prev);
      } else {
        fail({"input", "output", "inout", "identifier"});
      }
      if (!accept(",")) break;
    }
  } else {
    while (true) {
      if (is_symbol(".")) unsupported(peek(), "explicit port expression");
      const Token& start = peek();
      Node ref = make(NodeKind::PortRef, start, expect_identifier());
      ports.children.push_back(std::move(ref));
      if (!accept(",")) break;
    }
  }
  expect(")");
  close(ports);
}

Node Parser::parse_data_type(bool allow_kind) {
  const Token& start = peek();
  Node type = make(NodeKind::DataType, start);
  if (allow_kind && (is_keyword("wire") || is_keyword("reg") || is_keyword("integer"))) {
    type.text = advance().text;
  } else if (allow_kind && peek().kind == TokenKind::Identifier && unsupported_items().count(peek().text)) {
    unsupported(peek(), peek().text);
  }
  if (accept("signed")) type.aux = "signed";
  if (is_symbol("[")) type.children.push_back(parse_range());
  close(type);
  return type;
}

Node Parser::parse_range() {
  const Token& start = expect("[");
  Node range = make(NodeKind::Range, start);
  range.children.push_back(parse_expression());
  expect(":");
  range.children.push_back(parse_expression());
  expect("]");
  close(range);
  return range;
}

Node Parser::parse_declarator(bool allow_unpacked, bool allow_init) {
  const Token& start = peek();
  Node decl = make(NodeKind::Declarator, start, expect_identifier());
  if (is_symbol("[")) {
    if (!allow_unpacked) fail({",", ";", ")"});
    decl.children.push_back(parse_range());
    if (is_symbol("[")) unsupported(peek(), "multi-dimensional array");
  } else {
    decl.children.push_back(make(NodeKind::Empty, peek()));
  }
  if (is_symbol("=")) {
    if (!allow_init) fail({",", ";", ")"});
    advance();
    decl.children.push_back(parse_expression());
  } else {
    decl.children.push_back(make(NodeKind::Empty, peek()));
  }
  close(decl);
  return decl;
}

Node Parser::parse_decl_body(NodeKind kind, std::string aux, Node type, bool allow_unpacked, bool allow_init) {
  Node decl(kind, {}, std::move(aux));
  decl.span = type.span;
  decl.children.push_back(std::move(type));
  decl.children.push_back(parse_declarator(allow_unpacked, allow_init));
  while (is_symbol(",") && kind != NodeKind::ParamDecl) {
    advance();
    decl.children.push_back(parse_declarator(allow_unpacked, allow_init));
  }
  close(decl);
  return decl;
}

void Parser::parse_module_item(Node& module) {
  const Token& start = peek();
  if (is_symbol("(") && is_symbol("*", 1)) unsupported(start, "attribute");
  if (start.kind != TokenKind::Identifier) fail({"module item"});
  const std::string& word = start.text;

  if (word == "input" || word == "output" || word == "inout") {
    advance();
    Node type = parse_data_type(true);
    Node decl = parse_decl_body(NodeKind::PortDecl, word, std::move(type), false, false);
    decl.span.line = start.line;
    decl.span.col = start.col;
    expect(";");
    close(decl);
    module.children.push_back(std::move(decl));
  } else if (word == "wire" || word == "reg" || word == "integer") {
    Node type = parse_data_type(true);
    Node decl = parse_decl_body(NodeKind::NetDecl, {}, std::move(type), word != "wire", true);
    expect(";");
    close(decl);
    module.children.push_back(std::move(decl));
  } else if (word == "parameter" || word == "localparam") {
    advance();
    Node type = parse_data_type(true);
    Node decl = parse_decl_body(NodeKind::ParamDecl, word, std::move(type), false, true);
    decl.span.line = start.line;
    decl.span.col = start.col;
    // parameter A = 1, B = 2;  becomes one node with several declarators.
    while (accept(",")) decl.children.push_back(parse_declarator(false, true));
    expect(";");
    close(decl);
    module.children.push_back(std::move(decl));
  } else if (word == "assign") {
    parse_continuous_assign(module);
  } else if (word == "always") {
    module.children.push_back(parse_always());
  } else if (unsupported_items().count(word)) {
    unsupported(start, word);
  } else if (!reserved_words().count(word)) {
    module.children.push_back(parse_instantiation());
  } else {
    fail({"module item"});
  }
}

void Parser::parse_continuous_assign(Node& module) {
  const Token& start = expect("assign");
  Node delay = is_symbol("#") ? parse_delay() : make(NodeKind::Empty, peek());
  while (true) {
    Node assign = make(NodeKind::ContinuousAssign, start);
    assign.children.push_back(delay);
    assign.children.push_back(parse_lvalue());
    expect("=");
    assign.children.push_back(parse_expression());
    close(assign);
    module.children.push_back(std::move(assign));
    if (!accept(",")) break;
  }
  expect(";");
}

Node Parser::parse_always() {
  const Token& start = expect("always");
  Node always = make(NodeKind::Always, start);
  if (!is_symbol("@")) unsupported(start, "always without event control");
  always.children.push_back(parse_event_control());
  always.children.push_back(parse_statement());
  close(always);
  return always;
}

Node Parser::parse_event_control() {
  const Token& start = expect("@");
  Node ctrl = make(NodeKind::EventControl, start);
  if (accept("*")) {
    ctrl.text = "*";
    close(ctrl);
    return ctrl;
  }
  expect("(");
  if (accept("*")) {
    expect(")");
    ctrl.text = "*";
    close(ctrl);
    return ctrl;
  }
  while (true) {
    const Token& ev_start = peek();
    Node ev = make(NodeKind::EventExpr, ev_start);
    if (is_keyword("posedge") || is_keyword("negedge")) ev.aux = advance().text;
    ev.children.push_back(parse_expression());
    close(ev);
    ctrl.children.push_back(std::move(ev));
    if (!accept("or") && !accept(",")) break;
  }
  expect(")");
  close(ctrl);
  return ctrl;
}

Node Parser::parse_connection(bool allow_named_empty) {
  const Token& start = peek();
  Node conn = make(NodeKind::Connection, start);
  if (accept(".")) {
    if (is_symbol("*", 0)) unsupported(start, "wildcard port connection");
    conn.text = expect_identifier();
    if (!is_symbol("(")) unsupported(start, "implicit named port connection");
    expect("(");
    if (is_symbol(")") && allow_named_empty) {
      conn.children.push_back(make(NodeKind::Empty, peek()));
    } else {
      conn.children.push_back(parse_expression());
    }
    expect(")");
  } else {
    if (is_symbol(",") || is_symbol(")")) unsupported(start, "empty positional connection");
    conn.children.push_back(parse_expression());
  }
  close(conn);
  return conn;
}

Node Parser::parse_instantiation() {
  const Token& start = peek();
  Node inst = make(NodeKind::Instantiation, start, expect_identifier());
  Node args = make(NodeKind::ParamArgs, peek());
  if (accept("#")) {
    expect("(");
    bool first = true;
    while (!is_symbol(")")) {
      if (!first) expect(",");
      first = false;
      args.children.push_back(parse_connection(false));
    }
    expect(")");
  }
  close(args);
  inst.children.push_back(std::move(args));
  while (true) {
    const Token& item_start = peek();
    Node item = make(NodeKind::InstanceItem, item_start, expect_identifier());
    if (is_symbol("[")) unsupported(peek(), "array of instances");
    expect("(");
    bool first = true;
    while (!is_symbol(")")) {
      if (!first) expect(",");
      first = false;
      item.children.push_back(parse_connection(true));
    }
    expect(")");
    close(item);
    inst.children.push_back(std::move(item));
    if (!accept(",")) break;
  }
  expect(";");
  close(inst);
  return inst;
}

Node Parser::parse_delay() {
  const Token& start = expect("#");
  Node delay = make(NodeKind::Delay, start);
  if (peek().kind == TokenKind::Number) {
    const Token& t = advance();
    delay.children.push_back(make(NodeKind::Number, t, t.text));
  } else if (peek().kind == TokenKind::Identifier && !reserved_words().count(peek().text)) {
    const Token& t = advance();
    delay.children.push_back(make(NodeKind::Ident, t, t.text));
  } else if (accept("(")) {
    delay.children.push_back(parse_expression());
    expect(")");
  } else {
    fail({"delay value"});
  }
  close(delay);
  return delay;
}

Node Parser::parse_statement() {
  const Token& start = peek();
  if (start.kind == TokenKind::System) unsupported(start, "system task " + start.text);
  if (is_symbol("@")) unsupported(start, "procedural event control");
  if (is_symbol(";")) {
    advance();
    Node n = make(NodeKind::NullStmt, start);
    close(n);
    return n;
  }
  if (is_symbol("#")) {
    Node stmt = make(NodeKind::DelayStmt, start);
    stmt.children.push_back(parse_delay());
    stmt.children.push_back(parse_statement());
    close(stmt);
    return stmt;
  }
  if (start.kind == TokenKind::Identifier) {
    const std::string& word = start.text;
    if (word == "begin") {
      advance();
      Node block = make(NodeKind::Block, start);
      if (accept(":")) block.text = expect_identifier();
      while (!is_keyword("end")) {
        if (at_end()) fail({"end"});
        block.children.push_back(parse_statement());
      }
      expect("end");
      close(block);
      return block;
    }
    if (word == "if") {
      advance();
      Node n = make(NodeKind::If, start);
      expect("(");
      n.children.push_back(parse_expression());
      expect(")");
      n.children.push_back(parse_statement());
      if (accept("else")) {
        n.children.push_back(parse_statement());
      } else {
        n.children.push_back(make(NodeKind::Empty, peek()));
      }
      close(n);
      return n;
    }
    if (word == "case" || word == "casez" || word == "casex") return parse_case();
    if (word == "for" || word == "while" || word == "repeat" || word == "forever" || word == "fork" ||
        word == "wait" || word == "disable") {
      unsupported(start, word);
    }
    if (reserved_words().count(word)) fail({"statement"});
  }
  if (start.kind != TokenKind::Identifier && !is_symbol("{")) fail({"statement"});
  Node lhs = parse_lvalue();
  NodeKind kind;
  if (accept("=")) {
    kind = NodeKind::BlockingAssign;
  } else if (accept("<=")) {
    kind = NodeKind::NonblockingAssign;
  } else {
    fail({"=", "<="});
  }
  if (is_symbol("#")) unsupported(peek(), "intra-assignment delay");
  Node assign = make(kind, start);
  assign.children.push_back(std::move(lhs));
  assign.children.push_back(parse_expression());
  expect(";");
  close(assign);
  return assign;
}

Node Parser::parse_case() {
  const Token& start = advance();
  Node n = make(NodeKind::Case, start, {}, start.text);
  expect("(");
  n.children.push_back(parse_expression());
  expect(")");
  while (!is_keyword("endcase")) {
    if (at_end()) fail({"endcase"});
    const Token& item_start = peek();
    Node item = make(NodeKind::CaseItem, item_start);
    if (accept("default")) {
      item.text = "default";
      accept(":");
    } else {
      while (true) {
        item.children.push_back(parse_expression());
        if (!accept(",")) break;
      }
      expect(":");
    }
    item.children.push_back(parse_statement());
    close(item);
    n.children.push_back(std::move(item));
  }
  expect("endcase");
  close(n);
  return n;
}

Node Parser::parse_lvalue() {
  const Token& start = peek();
  if (is_symbol("{")) {
    Node cat = parse_concat();
    if (cat.kind != NodeKind::Concat) unsupported(start, "replication as assignment target");
    return cat;
  }
  Node base = make(NodeKind::Ident, start, expect_identifier());
  return parse_postfix(std::move(base));
}

Node Parser::parse_expression() { return parse_ternary(); }

Node Parser::parse_ternary() {
  const Token& start = peek();
  Node cond = parse_binary(0);
  if (!is_symbol("?")) return cond;
  advance();
  Node n = make(NodeKind::Ternary, start);
  n.span = cond.span;
  n.children.push_back(std::move(cond));
  n.children.push_back(parse_ternary());
  expect(":");
  n.children.push_back(parse_ternary());
  close(n);
  return n;
}

Node Parser::parse_binary(int level) {
  if (level >= static_cast<int>(kLevels.size())) return parse_unary();
  Node lhs = parse_binary(level + 1);
  while (true) {
    const auto& t = peek();
    if (t.kind != TokenKind::Symbol) break;
    bool matched = false;
    for (auto op : kLevels[level].ops) {
      if (!op.empty() && t.text == op) matched = true;
    }
    if (!matched) break;
    std::string op = advance().text;
    Node n(NodeKind::Binary, op);
    n.span = lhs.span;
    n.children.push_back(std::move(lhs));
    n.children.push_back(parse_binary(level + 1));
    close(n);
    lhs = std::move(n);
  }
  return lhs;
}

Node Parser::parse_unary() {
  const auto& t = peek();
  if (t.kind == TokenKind::Symbol) {
    for (auto op : kUnaryOps) {
      if (t.text == op) {
        const Token& start = advance();
        Node n = make(NodeKind::Unary, start, std::string(op));
        n.children.push_back(parse_unary());
        close(n);
        return n;
      }
    }
  }
  return parse_primary();
}

Node Parser::parse_primary() {
  const Token& start = peek();
  switch (start.kind) {
    case TokenKind::Number: {
      advance();
      Node n = make(NodeKind::Number, start, start.text);
      return n;
    }
    case TokenKind::Identifier: {
      if (reserved_words().count(start.text)) fail({"expression"});
      advance();
      std::string name = start.text;
      while (hierarchical_ && is_symbol(".") && peek(1).kind == TokenKind::Identifier) {
        advance();
        name += "." + advance().text;
      }
      Node n = make(NodeKind::Ident, start, std::move(name));
      close(n);
      return parse_postfix(std::move(n));
    }
    case TokenKind::System: {
      advance();
      Node n = make(NodeKind::SysCall, start, start.text);
      if (accept("(")) {
        bool first = true;
        while (!is_symbol(")")) {
          if (!first) expect(",");
          first = false;
          n.children.push_back(parse_expression());
        }
        expect(")");
      }
      close(n);
      return n;
    }
    case TokenKind::Symbol:
      if (start.text == "(") {
        advance();
        Node inner = parse_expression();
        expect(")");
        return inner;
      }
      if (start.text == "{") return parse_concat();
      break;
    case TokenKind::End:
      break;
  }
  fail({"expression"});
}

Node Parser::parse_postfix(Node base) {
  while (is_symbol("[")) {
    advance();
    Node index = parse_expression();
    if (is_symbol(":") || is_symbol("+:") || is_symbol("-:")) {
      std::string op = advance().text;
      Node sel(NodeKind::PartSelect, op);
      sel.span = base.span;
      sel.children.push_back(std::move(base));
      sel.children.push_back(std::move(index));
      sel.children.push_back(parse_expression());
      expect("]");
      close(sel);
      base = std::move(sel);
    } else {
      expect("]");
      Node sel(NodeKind::BitSelect);
      sel.span = base.span;
      sel.children.push_back(std::move(base));
      sel.children.push_back(std::move(index));
      close(sel);
      base = std::move(sel);
    }
  }
  return base;
}

Node Parser::parse_concat() {
  const Token& start = expect("{");
  Node first = parse_expression();
  if (is_symbol("{")) {
    Node rep = make(NodeKind::Replicate, start);
    rep.children.push_back(std::move(first));
    rep.children.push_back(parse_concat());
    if (rep.children.back().kind != NodeKind::Concat) unsupported(start, "nested replication");
    expect("}");
    close(rep);
    return rep;
  }
  Node cat = make(NodeKind::Concat, start);
  cat.children.push_back(std::move(first));
  while (accept(",")) cat.children.push_back(parse_expression());
  expect("}");
  close(cat);
  return cat;
}

Node parse(const SourceFile& file) {
  Parser parser(tokenize(file), file.path());
  return parser.parse_source();
}

Node parse_text(std::string path, std::string text) {
  SourceFile file(std::move(path), std::move(text));
  return parse(file);
}

Node parse_expression_text(std::string_view text) {
  SourceFile file("<expr>", std::string(text));
  Parser parser(tokenize(file), file.path());
  Node expr = parser.parse_expression();
  if (!parser.at_end()) parser.fail({"end of expression"});
  assign_ids(expr);
  return expr;
}

}  // namespace rtlmut::hdl
