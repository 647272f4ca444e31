#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtlmut::mut {

enum class OperatorId : std::uint8_t {
  IDX_OFFSET,
  SHIFT_AMT,
  PARTSEL_BOUND,
  SLICE_MIRROR,
  TERNARY_BRANCH,
  RELOP_SWAP,
  GUARD_FORCE,
  CASE_SEMANTICS,
  IF_REMOVE,
  CASE_REMOVE,
  STMT_CONST,
  ASSIGN_CONST,
  INST_PARAM,
  DELAY_CONST,
  PORT_SWAP,
  CONCAT_SWAP,
  ASSIGN_DUP,
};

enum class OperatorGroup : std::uint8_t {
  IndexingAndBitSelection,
  ExpressionAndControlSemantics,
  ConstantsAndParameters,
  ConnectivityAndDataflow,
};

const std::vector<OperatorId>& all_operators();
std::string_view operator_name(OperatorId id);
std::optional<OperatorId> operator_from_name(std::string_view name);
OperatorGroup operator_group(OperatorId id);
std::string_view group_name(OperatorGroup group);

/// Involutive operator table used by RELOP_SWAP. Returns the partner of
/// `op`, or nullopt when the operator has none.
std::optional<std::string_view> relop_partner(std::string_view op);

}  // namespace rtlmut::mut
