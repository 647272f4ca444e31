#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/hdl/ast.hpp"
#include "rtlmut/sim/trace.hpp"

namespace rtlmut::sva {

class UnknownSignal : public std::runtime_error {
 public:
  explicit UnknownSignal(const std::string& n) : std::runtime_error("unknown signal '" + n + "'"), name_(n) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class TraceTooShort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `##delay expr`; the first term of a sequence may have delay 0.
struct SeqTerm {
  std::uint32_t delay = 0;
  hdl::Node expr;
};

struct Sequence {
  std::vector<SeqTerm> terms;
  std::uint32_t span() const;
};

enum class Edge : std::uint8_t { Pos, Neg };

struct Property {
  std::string name;
  std::string clock;
  Edge edge = Edge::Pos;
  std::optional<hdl::Node> disable;
  std::optional<Sequence> antecedent;
  Sequence consequent;      // the whole body when there is no implication
  bool overlapping = true;  // |-> vs |=>
  std::uint32_t line = 0;
  std::string text;

  bool implication() const { return antecedent.has_value(); }
  /// Minimum trace length at which any obligation can fail.
  std::uint32_t depth() const;
  /// Identifiers referenced anywhere in the property, clock included.
  std::set<std::string> signals() const;
};

struct Diagnostic {
  std::uint32_t line = 0;
  std::string message;
};

struct AssertionSet {
  std::string source;
  std::string run;
  std::vector<Property> properties;
  std::vector<Diagnostic> diagnostics;
  std::size_t statements = 0;

  double syntax_rate() const;
};

/// Reads `[label:] assert property (@(posedge|negedge clk) [disable iff (e)] seq [|->|=> seq]);`
/// statements. Malformed statements become diagnostics.
AssertionSet parse_sva(const std::string& text, const std::string& source = {}, const std::string& run = {});

/// Moves properties that reference signals missing from `signals` into
/// diagnostics.
void bind_signals(AssertionSet& set, const std::vector<sim::TraceSignal>& signals);

struct MonitorResult {
  enum class Kind : std::uint8_t { Pass, Violation, Vacuous } kind = Kind::Vacuous;
  std::size_t cycle = 0;  // Violation only
};

const char* monitor_name(MonitorResult::Kind k);

/// Clocked monitor over a sampled trace. Each cycle starts one attempt; a
/// matched antecedent creates an obligation that fails at the first cycle a
/// consequent term is false. Cycles where the disable expression holds
/// cancel attempts that span them. Obligations still open at the end of the
/// trace neither pass nor fail.
MonitorResult check_on_trace(const Property& p, const sim::Trace& trace);

}  // namespace rtlmut::sva
