#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtlmut/elab/design.hpp"
#include "rtlmut/hdl/ast.hpp"

namespace rtlmut::mut {

struct DeclRange {
  std::int64_t msb = 0;
  std::int64_t lsb = 0;

  std::int64_t lo() const { return msb < lsb ? msb : lsb; }
  std::int64_t hi() const { return msb < lsb ? lsb : msb; }
};

/// Sized or unsized integer literal without x/z digits.
bool perturbable(const hdl::Node& n);

/// Literal positions (relative to `rhs`) in preorder, skipping select
/// indices and bounds.
std::vector<hdl::NodePath> rhs_literals(const hdl::Node& rhs);

/// Declared bit range of a select base: a vector or one word of an array.
std::optional<DeclRange> declared_range(const elab::Design& d, const elab::Instance& inst, const hdl::Node& base);

/// Constant selects outside their declared range, or with reversed bounds.
std::size_t count_illegal_selects(const elab::Design& d, const hdl::Node& module, const elab::Instance& inst);

}  // namespace rtlmut::mut
