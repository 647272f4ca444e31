#include "rtlmut/mut/operators.hpp"

#include <array>
#include <utility>

namespace rtlmut::mut {

namespace {

struct Row {
  OperatorId id;
  std::string_view name;
  OperatorGroup group;
};

constexpr std::array<Row, 17> kRows{{
    {OperatorId::IDX_OFFSET, "IDX_OFFSET", OperatorGroup::IndexingAndBitSelection},
    {OperatorId::SHIFT_AMT, "SHIFT_AMT", OperatorGroup::IndexingAndBitSelection},
    {OperatorId::PARTSEL_BOUND, "PARTSEL_BOUND", OperatorGroup::IndexingAndBitSelection},
    {OperatorId::SLICE_MIRROR, "SLICE_MIRROR", OperatorGroup::IndexingAndBitSelection},
    {OperatorId::TERNARY_BRANCH, "TERNARY_BRANCH", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::RELOP_SWAP, "RELOP_SWAP", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::GUARD_FORCE, "GUARD_FORCE", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::CASE_SEMANTICS, "CASE_SEMANTICS", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::IF_REMOVE, "IF_REMOVE", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::CASE_REMOVE, "CASE_REMOVE", OperatorGroup::ExpressionAndControlSemantics},
    {OperatorId::STMT_CONST, "STMT_CONST", OperatorGroup::ConstantsAndParameters},
    {OperatorId::ASSIGN_CONST, "ASSIGN_CONST", OperatorGroup::ConstantsAndParameters},
    {OperatorId::INST_PARAM, "INST_PARAM", OperatorGroup::ConstantsAndParameters},
    {OperatorId::DELAY_CONST, "DELAY_CONST", OperatorGroup::ConstantsAndParameters},
    {OperatorId::PORT_SWAP, "PORT_SWAP", OperatorGroup::ConnectivityAndDataflow},
    {OperatorId::CONCAT_SWAP, "CONCAT_SWAP", OperatorGroup::ConnectivityAndDataflow},
    {OperatorId::ASSIGN_DUP, "ASSIGN_DUP", OperatorGroup::ConnectivityAndDataflow},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kRelops{{
    {"<", "<="},
    {">", ">="},
    {"==", "!="},
    {"===", "!=="},
    {"&&", "||"},
    {"&", "|"},
    {"^", "~^"},
}};

}  // namespace

const std::vector<OperatorId>& all_operators() {
  static const std::vector<OperatorId> ops = [] {
    std::vector<OperatorId> v;
    for (const auto& r : kRows) v.push_back(r.id);
    return v;
  }();
  return ops;
}

std::string_view operator_name(OperatorId id) { return kRows[static_cast<std::size_t>(id)].name; }

std::optional<OperatorId> operator_from_name(std::string_view name) {
  for (const auto& r : kRows) {
    if (r.name == name) return r.id;
  }
  return std::nullopt;
}

OperatorGroup operator_group(OperatorId id) { return kRows[static_cast<std::size_t>(id)].group; }

std::string_view group_name(OperatorGroup group) {
  switch (group) {
    case OperatorGroup::IndexingAndBitSelection:
      return "Indexing and bit selection";
    case OperatorGroup::ExpressionAndControlSemantics:
      return "Expression and control semantics";
    case OperatorGroup::ConstantsAndParameters:
      return "Constants and parameters";
    case OperatorGroup::ConnectivityAndDataflow:
      return "Connectivity and dataflow";
  }
  return "";
}

std::optional<std::string_view> relop_partner(std::string_view op) {
  for (const auto& [a, b] : kRelops) {
    if (op == a) return b;
    if (op == b) return a;
  }
  return std::nullopt;
}

}  // namespace rtlmut::mut
