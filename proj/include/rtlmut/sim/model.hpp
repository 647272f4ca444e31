#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/sim/expr.hpp"

namespace rtlmut::sim {

class CombinationalLoop : public SimError {
 public:
  using SimError::SimError;
};

class WidthMismatch : public SimError {
 public:
  using SimError::SimError;
};

struct Var {
  std::string name;  // hierarchical
  std::uint32_t slot = 0;
  std::uint32_t width = 1;
  std::int64_t msb = 0;
  std::int64_t lsb = 0;
  bool is_array = false;
  std::int64_t array_lo = 0;
  std::int64_t array_size = 0;
  bool is_reg = false;
  bool top_input = false;
  bool top_output = false;
  std::uint64_t init = 0;
};

/// One bit-range of an assignment target.
struct LvPart {
  std::uint32_t slot = 0;
  std::uint32_t word_width = 1;
  std::uint32_t width = 1;
  bool dyn_word = false;
  std::uint32_t word_expr = 0;
  std::int64_t array_lo = 0;
  std::int64_t array_size = 0;
  enum class Bits : std::uint8_t { Whole, Const, Dyn } bits = Bits::Whole;
  std::int64_t low = 0;           // Const: low bit position
  std::uint32_t low_expr = 0;     // Dyn: low = desc ? idx + k : k - idx
  bool desc = true;
  std::int64_t k = 0;
};

struct LValue {
  std::vector<LvPart> parts;  // most significant first
  std::uint32_t width = 0;
};

struct CaseLabel {
  std::uint32_t expr = 0;
  std::uint64_t care = ~0ULL;  // bits that must match
  bool never = false;          // x/z label in a plain case
};

struct CaseArm {
  std::vector<CaseLabel> labels;  // empty for default
  std::uint32_t body = 0;
};

struct Stmt {
  enum class Kind : std::uint8_t { Block, If, Case, Assign, Null } kind = Kind::Null;
  std::vector<std::uint32_t> children;  // Block
  std::uint32_t expr = 0;               // If condition, Case selector, Assign rhs
  std::int64_t then_s = -1, else_s = -1;
  std::vector<CaseArm> arms;
  std::uint32_t lvalue = 0;
  bool nonblocking = false;
};

struct Process {
  bool sequential = false;
  std::uint32_t body = 0;
  std::string origin;  // "file:line"
  std::vector<std::pair<std::uint32_t, std::uint64_t>> reads;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> writes;
};

enum class InputRole : std::uint8_t { Data, Clock, ResetHigh, ResetLow };

struct InputPort {
  std::string name;
  std::uint32_t slot = 0;
  std::uint32_t width = 1;
  InputRole role = InputRole::Data;
};

/// Observable scalar: a signal or one word of an array ("mem[3]").
struct Observed {
  std::string name;
  std::uint32_t slot = 0;
  std::uint32_t width = 1;
  bool top_output = false;
  bool is_reg = false;
  std::int64_t msb = 0;
  std::int64_t lsb = 0;
};

/// Flattened, scheduled design ready for cycle simulation.
class Model {
 public:
  static Model compile(const elab::Design& design);

  const std::string& design_id() const { return design_id_; }
  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<InputPort>& inputs() const { return inputs_; }
  const std::vector<Observed>& observed() const { return observed_; }
  std::uint32_t slot_count() const { return slot_count_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool has_sequential() const;
  /// Sum of widths of data (non-clock, non-reset) inputs.
  std::uint32_t data_input_bits() const;
  /// Names in the equivalence observation set: top outputs and registers.
  std::vector<std::string> equivalence_observables() const;
  int observed_index(const std::string& name) const;

  const ExprProgram& program() const { return program_; }
  const std::vector<Stmt>& stmts() const { return stmts_; }
  const std::vector<LValue>& lvalues() const { return lvalues_; }
  const std::vector<Process>& comb_schedule() const { return comb_; }
  const std::vector<Process>& sequential() const { return seq_; }

 private:
  friend class ModelBuilder;
  std::string design_id_;
  std::vector<Var> vars_;
  std::vector<InputPort> inputs_;
  std::vector<Observed> observed_;
  std::uint32_t slot_count_ = 0;
  std::vector<std::string> warnings_;
  ExprProgram program_;
  std::vector<Stmt> stmts_;
  std::vector<LValue> lvalues_;
  std::vector<Process> comb_;
  std::vector<Process> seq_;
};

}  // namespace rtlmut::sim
