#include "rtlmut/hdl/lexer.hpp"

#include <array>
#include <cctype>
#include <string_view>

namespace rtlmut::hdl {

namespace {

constexpr std::array<std::string_view, 22> kMultiSymbols = {
    "<<<", ">>>", "===", "!==", "|->", "|=>", "##", "<<", ">>", "<=", ">=",
    "==",  "!=",  "&&",  "||",  "~&",  "~|",  "~^", "^~", "+:", "-:", "**",
};

constexpr std::string_view kSingleSymbols = "()[]{},;:.#@=+-*/%&|^~!<>?";

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_base_char(char c) {
  switch (c) {
    case 'b': case 'B': case 'o': case 'O': case 'd': case 'D': case 'h': case 'H':
      return true;
    default:
      return false;
  }
}
bool is_based_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' || c == 'x' || c == 'X' || c == 'z' ||
         c == 'Z' || c == '?';
}

class Lexer {
 public:
  explicit Lexer(const SourceFile& file) : file_(file), text_(file.text()) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = TokenKind::End;
    auto [l, c] = pos_ == 0 ? std::pair<std::uint32_t, std::uint32_t>{1, 1} : file_.position(text_.size() - 1);
    end.line = end.end_line = l;
    end.col = end.end_col = c + 1;
    out.push_back(end);
    return out;
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        const auto start = pos_;
        pos_ += 2;
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) ++pos_;
        if (pos_ + 1 >= text_.size()) error_at(start, "unterminated comment", {"*/"});
        pos_ += 2;
      } else if (c == '`') {
        directive();
      } else {
        break;
      }
    }
  }

  void directive() {
    const auto start = pos_;
    ++pos_;
    std::string name;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) name += text_[pos_++];
    if (name != "timescale") {
      auto [l, c] = file_.position(start);
      throw UnsupportedConstruct(file_.path(), l, c, "compiler directive `" + name);
    }
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void error_at(std::size_t offset, const std::string& found, std::vector<std::string> expected) {
    auto [l, c] = file_.position(offset);
    throw SyntaxError(file_.path(), l, c, found, std::move(expected));
  }

  Token make(TokenKind kind, std::size_t start, std::string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    std::tie(t.line, t.col) = file_.position(start);
    std::tie(t.end_line, t.end_col) = file_.position(pos_ - 1);
    return t;
  }

  Token next() {
    const auto start = pos_;
    const char c = text_[pos_];
    if (c == '\\') {
      auto [l, col] = file_.position(start);
      throw UnsupportedConstruct(file_.path(), l, col, "escaped identifier");
    }
    if (c == '"') {
      auto [l, col] = file_.position(start);
      throw UnsupportedConstruct(file_.path(), l, col, "string literal");
    }
    if (is_ident_start(c)) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      return make(TokenKind::Identifier, start, text_.substr(start, pos_ - start));
    }
    if (c == '$' && is_ident_start(peek(1))) {
      ++pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      return make(TokenKind::System, start, text_.substr(start, pos_ - start));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && is_base_char(based_char_after_tick()))) {
      return number(start);
    }
    for (auto sym : kMultiSymbols) {
      if (text_.compare(pos_, sym.size(), sym) == 0) {
        pos_ += sym.size();
        return make(TokenKind::Symbol, start, sym == "^~" ? std::string("~^") : std::string(sym));
      }
    }
    if (kSingleSymbols.find(c) != std::string_view::npos) {
      ++pos_;
      return make(TokenKind::Symbol, start, std::string(1, c));
    }
    error_at(start, std::string(1, c), {});
  }

  char based_char_after_tick() const {
    std::size_t p = pos_ + 1;
    if (p < text_.size() && (text_[p] == 's' || text_[p] == 'S')) ++p;
    return p < text_.size() ? text_[p] : '\0';
  }

  Token number(std::size_t start) {
    std::string lit;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      lit += text_[pos_++];
    }
    // Size and base may be separated by whitespace: 8 'hFF.
    std::size_t probe = pos_;
    while (probe < text_.size() && (text_[probe] == ' ' || text_[probe] == '\t')) ++probe;
    if (probe < text_.size() && text_[probe] == '\'') {
      std::size_t q = probe + 1;
      std::string base;
      if (q < text_.size() && (text_[q] == 's' || text_[q] == 'S')) base += text_[q++];
      if (q < text_.size() && is_base_char(text_[q])) {
        base += text_[q++];
        while (q < text_.size() && (text_[q] == ' ' || text_[q] == '\t')) ++q;
        std::string digits;
        while (q < text_.size() && is_based_digit(text_[q])) digits += text_[q++];
        if (digits.empty()) error_at(q, q < text_.size() ? std::string(1, text_[q]) : "end of file", {"digits"});
        pos_ = q;
        lit += "'" + base + digits;
      }
    }
    return make(TokenKind::Number, start, lit);
  }

  const SourceFile& file_;
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(const SourceFile& file) { return Lexer(file).run(); }

}  // namespace rtlmut::hdl
