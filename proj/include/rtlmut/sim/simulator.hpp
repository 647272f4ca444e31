#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtlmut/sim/model.hpp"
#include "rtlmut/sim/trace.hpp"

namespace rtlmut::sim {

/// Input schedule. Random and exhaustive stimuli are fully described by
/// their descriptor string; explicit ones carry their rows.
struct Stimulus {
  enum class Kind : std::uint8_t { Random, Exhaustive, Explicit } kind = Kind::Random;
  std::uint64_t seed = 0;
  std::uint32_t reset_cycles = 4;
  std::uint64_t cycles = 0;
  std::vector<std::map<std::string, std::uint64_t>> rows;

  static Stimulus random(std::uint64_t seed, std::uint32_t reset_cycles, std::uint64_t cycles);
  /// Reset, then every data-input combination once.
  static Stimulus exhaustive(const Model& model, std::uint32_t reset_cycles);
  static Stimulus explicit_rows(std::vector<std::map<std::string, std::uint64_t>> rows);

  std::string describe() const;
  /// Inverse of describe() for random and exhaustive stimuli.
  static Stimulus parse(const std::string& text);
  std::uint64_t length() const { return kind == Kind::Explicit ? rows.size() : cycles; }
};

/// Values for each model input (in Model::inputs() order) at `cycle`.
std::vector<std::uint64_t> stimulus_inputs(const Model& model, const Stimulus& stim, std::uint64_t cycle);

class Simulator {
 public:
  explicit Simulator(const Model& model);

  void reset_state();
  void set_input(std::size_t input_index, std::uint64_t value);
  void apply_inputs(const std::vector<std::uint64_t>& values);
  void settle();
  /// Runs every edge-triggered process once and commits nonblocking writes.
  void clock_edge();

  std::uint64_t slot(std::uint32_t s) const { return vals_[s]; }
  std::uint64_t value(const std::string& observed_name) const;
  std::vector<std::uint64_t> sample() const;

 private:
  struct Write {
    std::uint32_t slot;
    std::uint64_t mask;
    std::uint64_t value;
  };
  void exec(std::uint32_t stmt, bool sequential);
  void assign(const Stmt& s, bool defer);
  std::uint64_t eval(std::uint32_t expr) const;

  const Model& m_;
  std::vector<std::uint64_t> vals_;
  std::vector<Write> nba_;
};

Trace simulate(const Model& model, const Stimulus& stim);

/// Simulates each stimulus; result i belongs to stimuli[i] for any worker count.
std::vector<Trace> simulate_all(const Model& model, const std::vector<Stimulus>& stimuli, unsigned workers);

enum class Equivalence : std::uint8_t { Equivalent, Distinguished, Unknown };
const char* equivalence_name(Equivalence e);

struct Witness {
  std::string stimulus;
  std::uint64_t cycle = 0;
  std::string signal;

  std::string to_string() const;
  static Witness parse(const std::string& text);
};

struct EquivalenceOptions {
  std::uint64_t seed = 1;
  std::uint32_t reset_cycles = 4;
  std::uint64_t random_cycles = 512;
  std::uint32_t exhaustive_bits = 14;
};

struct EquivalenceResult {
  Equivalence verdict = Equivalence::Unknown;
  std::optional<Witness> witness;
  std::string stimulus;
};

/// Runs golden and mutant in lockstep over the observation set of the golden
/// model (top outputs and registers). Combinational designs with at most
/// `exhaustive_bits` data-input bits are swept exhaustively.
EquivalenceResult check_equivalence(const Model& golden, const Model& mutant, const EquivalenceOptions& opts);

/// True when the witness cycle shows a difference on the witness signal.
bool replay_witness(const Model& golden, const Model& mutant, const Witness& w);

}  // namespace rtlmut::sim
