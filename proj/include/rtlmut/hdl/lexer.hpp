#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtlmut/hdl/source.hpp"

namespace rtlmut::hdl {

enum class TokenKind : std::uint8_t { Identifier, Number, System, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_col = 0;
};

/// Tokenizes the whole file. Comments are dropped and `timescale lines are
/// skipped; any other compiler directive is rejected as unsupported.
std::vector<Token> tokenize(const SourceFile& file);

}  // namespace rtlmut::hdl
