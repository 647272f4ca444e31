#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/hdl/transform.hpp"
#include "rtlmut/mut/operators.hpp"

namespace rtlmut::mut {

class InfeasibleAtApply : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MutationConfig {
  std::int64_t delta = 1;
  std::vector<std::string> validity_patterns{"valid", "ready", "en", "enable", "ack", "grant", "busy"};
  std::set<OperatorId> operators{all_operators().begin(), all_operators().end()};
};

/// True when a token of `name` (split on '_') equals a pattern, or contains
/// a pattern of four or more letters. Case-insensitive.
bool is_validity_name(const std::string& name, const std::vector<std::string>& patterns);

struct Candidate {
  elab::MutationTarget target;
  OperatorId op = OperatorId::IDX_OFFSET;
  std::string file;
  hdl::NodePath path;  // anchor, from the file's root
  std::string variant;
  std::uint32_t line = 0;
  std::uint32_t col = 0;

  std::string describe() const;
};

struct Infeasible {
  std::string reason;
};

using ProbeResult = std::variant<hdl::EditRecord, Infeasible>;

/// Candidates for each target, ordered by target then (file, line, col,
/// operator, variant, path). Anchors lie in the target's in-module fan-in:
/// the driving statements, the conditions and case structure enclosing
/// them, and the instances whose outputs drive them.
std::vector<Candidate> match_candidates(const elab::Design& design, const elab::ConnectivityGraph& graph,
                                        const std::vector<elab::MutationTarget>& targets,
                                        const MutationConfig& cfg);

/// Applies the candidate to a clone and screens the result. Never throws.
ProbeResult probe_apply(const elab::Design& design, const Candidate& cand, const MutationConfig& cfg);

struct Applied {
  hdl::Node file_ast;  // sanitized mutated file
  std::string text;    // emitted mutated file
  hdl::EditRecord edit;
};

/// Applies a probed candidate. Throws InfeasibleAtApply when the result no
/// longer matches `expected`.
Applied apply_operator(const elab::Design& design, const Candidate& cand, const MutationConfig& cfg,
                       const hdl::EditRecord& expected);

/// Applies the candidate's edit to `file_root` in place; used to stack
/// several edits on one tree. Returns the edit, or Infeasible.
ProbeResult apply_in_place(const elab::Design& design, hdl::Node& file_root, const Candidate& cand,
                           const MutationConfig& cfg);

}  // namespace rtlmut::mut
