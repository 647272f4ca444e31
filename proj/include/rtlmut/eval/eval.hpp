#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/sva/sva.hpp"
#include "rtlmut/util/kv.hpp"

namespace rtlmut::eval {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunCountMismatch : public EvalError {
 public:
  using EvalError::EvalError;
};

class MissingAssertionRuns : public EvalError {
 public:
  using EvalError::EvalError;
};

class MissingMergedVariant : public EvalError {
 public:
  using EvalError::EvalError;
};

enum class Verdict : std::uint8_t { Validated, Cex, Undetermined };
const char* verdict_name(Verdict v);

enum class Mode : std::uint8_t { Average, Union };
const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct EvalConfig {
  std::uint64_t seed = 1;
  std::uint32_t vectors = 4;
  std::uint32_t reset_cycles = 4;
  std::uint64_t sim_cycles = 256;
  std::uint32_t exhaustive_bits = 14;
  std::size_t runs = 3;
  unsigned workers = 1;
  bool lenient = false;
};

/// Assertion files of one generation run.
struct Run {
  std::string label;
  std::vector<sva::AssertionSet> sets;

  std::size_t statements() const;
  std::size_t parsed() const;
};

/// Every `*.sva`/`*.sv` file in `dir`, sorted by name.
Run load_run(const std::filesystem::path& dir, const std::string& label);
/// Subdirectories of `root` (sorted); throws RunCountMismatch unless there
/// are exactly `expected` of them. An empty `root` yields `expected` empty
/// runs.
std::vector<Run> load_runs(const std::filesystem::path& root, std::size_t expected);

/// `vectors` random stimuli, plus an exhaustive sweep for small
/// combinational designs.
std::vector<sim::Stimulus> validation_suite(const sim::Model& golden, const EvalConfig& cfg);
/// Validation suite plus the distinct witness stimuli, in first-seen order.
std::vector<sim::Stimulus> evaluation_suite(const sim::Model& golden, const EvalConfig& cfg,
                                            const std::vector<sim::Witness>& witnesses);

struct PropertyRef {
  std::string run;
  const sva::Property* prop = nullptr;

  std::string key() const { return run + "/" + prop->name; }
};

struct PropertyVerdict {
  std::string key;
  Verdict verdict = Verdict::Undetermined;
  std::string detail;
};

/// Checks each property on each golden trace. Violation anywhere gives
/// Cex; otherwise a non-vacuous trace gives Validated; else Undetermined.
std::vector<PropertyVerdict> validate_on_golden(const std::vector<PropertyRef>& props,
                                                const std::vector<sim::Trace>& golden_traces, unsigned workers);

/// Backward cone of the signals referenced by `props`.
std::set<std::string> property_cone(const std::vector<const sva::Property*>& props,
                                    const elab::ConnectivityGraph& graph);
/// |cone| / |graph nodes|.
double coi_coverage(const std::vector<const sva::Property*>& props, const elab::ConnectivityGraph& graph);

struct Variant {
  std::string id;
  std::filesystem::path dir;
};

/// Properties of `props` violated on one variant, by key.
struct VariantOutcome {
  std::string id;
  bool error = false;
  std::string detail;
  std::set<std::string> violated;
};

/// Elaborates each variant directory with the golden top, simulates every
/// stimulus and checks every property. Missing or broken variants become
/// error entries.
std::vector<VariantOutcome> evaluate_variants(const elab::Design& golden, const std::vector<Variant>& variants,
                                              const std::vector<PropertyRef>& props,
                                              const std::vector<sim::Stimulus>& suite, unsigned workers);

struct RunMetrics {
  std::string label;
  std::size_t statements = 0;
  std::size_t parsed = 0;
  std::size_t validated = 0;
  std::size_t cex = 0;
  std::size_t undetermined = 0;
  std::set<std::string> cone;
  std::size_t nodes = 0;
  std::set<std::string> killed;
  std::size_t variants = 0;  // kill denominator

  double syntax_rate() const;
  double coi() const;
  double kill_ratio() const;
};

struct Aggregate {
  Mode mode = Mode::Average;
  std::size_t runs = 0;
  double syntax_rate = 0;  // overall proportion in both modes
  std::size_t validated = 0;
  std::size_t total = 0;
  double coi = 0;
  double kill_ratio = 0;
  std::set<std::string> killed;  // union of per-run kill sets
};

/// Average: mean COI and kill ratio over runs. Union: both recomputed on
/// the merged cones and kill sets.
Aggregate aggregate(const std::vector<RunMetrics>& runs, Mode mode, std::size_t expected_runs);

struct BugAttribution {
  std::string mutant_id;
  bool single_violated = false;
  bool attributed = false;
};

struct HuntingResult {
  std::string merged_id;
  bool merged_violated = false;
  std::vector<BugAttribution> bugs;
  std::size_t attributed = 0;
  std::size_t unattributed = 0;  // merged-variant violations no constituent corroborates

  double kill_ratio() const;
};

/// A constituent counts as killed only when the merged variant and its own
/// single-bug variant are both violated.
HuntingResult attribute(const std::string& merged_id, const VariantOutcome& merged,
                        const std::vector<std::pair<std::string, const VariantOutcome*>>& singles,
                        const std::set<std::string>& scope);

struct KillRow {
  std::string variant;
  bool error = false;
  std::string detail;
  std::vector<std::string> killed_by;  // run labels
  std::size_t violated = 0;
};

struct EvaluationReport {
  std::string design_id;
  Mode mode = Mode::Average;
  util::KvBlock config;
  std::vector<RunMetrics> runs;
  Aggregate overall;
  std::vector<PropertyVerdict> verdicts;
  std::vector<KillRow> kill_table;
  std::optional<HuntingResult> hunting_union;
  std::vector<HuntingResult> hunting_runs;
  double hunting_ratio = 0;
};

std::string format_report(const EvaluationReport& r);
std::string format_table(const EvaluationReport& r);

}  // namespace rtlmut::eval
