#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "rtlmut/hdl/ast.hpp"

namespace rtlmut::elab {

using ParamEnv = std::map<std::string, std::int64_t>;

class NotConstant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer constant evaluation over literals and parameters. Comparisons
/// and logical operators yield 0/1. Throws NotConstant on signals,
/// unknown-valued literals, or division by zero.
std::int64_t eval_const(const hdl::Node& expr, const ParamEnv& env);

/// Ceiling log2 as defined for $clog2 (0 and 1 map to 0).
std::int64_t clog2(std::int64_t v);

}  // namespace rtlmut::elab
