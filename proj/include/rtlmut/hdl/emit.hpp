#pragma once

#include <string>

#include "rtlmut/hdl/ast.hpp"

namespace rtlmut::hdl {

/// Canonical pretty-printer: one statement per line, two-space indent,
/// parentheses only where precedence requires them. Output reparses to a
/// structurally equal tree.
std::string emit(const Node& node);

/// Emits any subtree: expressions inline, statements and items as lines
/// without trailing newline. Used for edit-record fragments.
std::string emit_fragment(const Node& node);

std::string emit_expression(const Node& expr);

}  // namespace rtlmut::hdl
