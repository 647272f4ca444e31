#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rtlmut/elab/design.hpp"

namespace rtlmut::elab {

enum class NodeClass : std::uint8_t { PrimaryInput, Constant, PortThrough, DrivenByLogic };

std::string_view node_class_name(NodeClass c);

struct Edge {
  std::string from;
  std::string to;
  std::string file;
  hdl::NodePath path;  // driving statement, assign, or port connection
  bool trivial = false;
};

/// One statement that writes a signal, whether or not it reads any.
struct Driver {
  std::string file;
  hdl::NodePath path;
  bool trivial = false;
  bool has_support = false;
};

/// Signal-level fan-in graph over the flattened hierarchy. Node names are
/// hierarchical ("count", "u_fifo.wr_ptr").
struct ConnectivityGraph {
  std::vector<std::string> nodes;  // sorted
  std::map<std::string, NodeClass> classes;
  std::map<std::string, int> instance_of;  // node -> instance index
  std::vector<Edge> edges;
  std::map<std::string, std::vector<std::size_t>> fanin;  // node -> edge indices
  std::map<std::string, std::vector<Driver>> drivers;
  std::map<std::string, std::string> local_name;

  bool has_node(const std::string& n) const { return classes.count(n) != 0; }
  /// All nodes from which `roots` are reachable, roots included.
  std::set<std::string> backward_reachable(const std::vector<std::string>& roots) const;
};

ConnectivityGraph build_connectivity(const Design& design);

struct ClockReset {
  std::set<std::string> clocks;            // hierarchical names
  std::map<std::string, bool> resets;      // name -> active low
  std::set<std::string> all() const;
};

struct ResetPatterns {
  std::vector<std::string> stems{"rst", "reset", "clr", "clear"};
  bool matches(const std::string& name) const;
  static bool active_low(const std::string& name);
};

/// Clocks are signals in edge-sensitive event controls that do not look
/// like resets; resets are reset-named signals in event lists or in the
/// first if-guard of a sequential block. Both are propagated up through
/// trivial port connections so that top-level inputs are classified too.
ClockReset classify_clock_reset(const Design& design, const ConnectivityGraph& graph,
                                const ResetPatterns& patterns = {});

struct MutationTarget {
  std::string module;
  std::string signal;
  std::string file;

  friend auto operator<=>(const MutationTarget&, const MutationTarget&) = default;
};

class UnknownSpecSignal : public ElabError {
 public:
  explicit UnknownSpecSignal(const std::string& n) : ElabError("unknown spec signal '" + n + "'") {}
};

class NoLogicDriver : public ElabError {
 public:
  explicit NoLogicDriver(const std::string& n) : ElabError("spec signal '" + n + "' has no logic driver") {}
};

/// Follows each spec signal backwards over trivial edges to the first
/// signals with a non-trivial driver. Clock/reset signals are skipped.
/// Output is deduplicated and sorted.
std::vector<MutationTarget> resolve_targets(const Design& design, const ConnectivityGraph& graph,
                                            const ClockReset& clock_reset,
                                            const std::vector<std::string>& spec_signals);

/// Assignment/instance statements of `module` that write `signal` directly
/// or through in-module fan-in, as paths into the module's file.
std::vector<hdl::NodePath> fanin_statements(const Design& design, const ConnectivityGraph& graph,
                                            const MutationTarget& target);

std::string format_targets(const std::vector<MutationTarget>& targets);

}  // namespace rtlmut::elab
