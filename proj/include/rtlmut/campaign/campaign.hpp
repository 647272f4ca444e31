#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/eval/eval.hpp"
#include "rtlmut/pipeline/pipeline.hpp"
#include "rtlmut/util/kv.hpp"

namespace rtlmut::campaign {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for inputs the campaign refuses: ingest rejections, missing
/// artifacts, failed strict checks. Maps to exit code 2.
class Rejection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingManifest : public Rejection {
 public:
  using Rejection::Rejection;
};

struct CampaignConfig {
  std::string design_dir;
  std::string top;
  std::string spec_signals;
  std::size_t budget = 20;
  double overgen = 1.5;
  std::uint64_t seed = 1;
  std::uint32_t vectors = 4;
  std::uint32_t exhaustive_bits = 14;
  std::uint32_t reset_cycles = 4;
  std::uint64_t sim_cycles = 256;
  std::uint64_t equiv_cycles = 512;
  std::string operators = "all";
  std::size_t runs = 3;
  bool strict = false;
  bool lenient = false;
  bool retain_unknown = false;
  unsigned workers = 1;

  /// Applies one `key = value` setting.
  void set(const std::string& key, const std::string& value);
  /// Reads a flat key/value file with `#` comments.
  void load(const std::filesystem::path& file);
  void validate() const;
  /// Everything that affects outputs; paths and worker count are left out
  /// so artifacts do not depend on where or how fast a campaign ran.
  util::KvBlock snapshot() const;

  pipeline::PipelineConfig pipeline() const;
  eval::EvalConfig evaluation() const;
};

struct BenchmarkEntry {
  std::string id;
  std::string group;
  std::string top;
  std::size_t loc = 0;
  std::filesystem::path root;  // <workspace>/<id>
  std::filesystem::path manifest_path;  // overrides the default location when set

  std::filesystem::path golden_dir() const { return root / "golden"; }
  std::filesystem::path spec() const { return root / "spec.txt"; }
  std::filesystem::path spec_signals() const { return root / "spec_signals.txt"; }
  std::filesystem::path manifest() const { return manifest_path.empty() ? root / "manifest.txt" : manifest_path; }
  std::filesystem::path mutants_dir() const { return root / "mutants"; }
  std::filesystem::path reports_dir() const { return root / "reports"; }
};

struct IngestResult {
  std::optional<BenchmarkEntry> entry;
  std::string reason;  // set on rejection
};

/// Directory holding the Verilog sources of a design: `<dir>/rtl` when
/// present, else `<dir>`.
std::filesystem::path rtl_dir(const std::filesystem::path& design_dir);

/// Checks a design without touching any workspace: every file parses, the
/// top elaborates, and the design has at least `min_loc` non-blank lines.
/// Returns the rejection reason, or "" when accepted.
std::string check_design(const std::filesystem::path& design_dir, const std::string& top, std::size_t min_loc = 200);

/// Checks the design and lays out an entry at `root` (golden copy, spec
/// files, entry.txt). The id is the last component of `root`.
IngestResult prepare_entry(const std::filesystem::path& design_dir, std::string top, const std::filesystem::path& root,
                           std::string group = {}, const std::filesystem::path& spec_signals = {});

/// Copies golden sources and spec files into `<workspace>/<id>/` and
/// records the entry in `<workspace>/index.txt`.
IngestResult ingest(const std::filesystem::path& design_dir, std::string top, const std::filesystem::path& workspace,
                    std::string id = {}, std::string group = {});

BenchmarkEntry load_entry(const std::filesystem::path& workspace, const std::string& id);
/// Entry whose directory is `root`.
BenchmarkEntry load_entry(const std::filesystem::path& root);
std::vector<BenchmarkEntry> load_index(const std::filesystem::path& workspace);

elab::Design load_golden(const BenchmarkEntry& entry);

struct TargetSet {
  elab::ConnectivityGraph graph;
  elab::ClockReset clock_reset;
  std::vector<elab::MutationTarget> targets;
};

TargetSet resolve_entry_targets(const elab::Design& golden, const BenchmarkEntry& entry);

/// Config snapshot headed by the design id and top module.
util::KvBlock provenance(const BenchmarkEntry& entry, const CampaignConfig& cfg);

/// Generates the corpus and writes manifest.txt, mutate.log and mutants/.
pipeline::CorpusResult run_mutate(const BenchmarkEntry& entry, const CampaignConfig& cfg);

/// Recomposes a five-bug variant from manifest records (the manifest's own
/// quintuple when `ids` is empty) and writes it to `out_dir`, by default
/// mutants/merged_<id>/.
pipeline::MergedVariant run_merge(const BenchmarkEntry& entry, std::vector<std::string> ids,
                                  const CampaignConfig& cfg, const std::filesystem::path& out_dir = {});

/// Syntax, golden validation, COI and kill ratio over the retained
/// single-bug variants; adds five-bug attribution when the manifest has a
/// merged variant.
eval::EvaluationReport run_prevention_eval(const BenchmarkEntry& entry, const std::filesystem::path& assertions,
                                           eval::Mode mode, const CampaignConfig& cfg);
/// Same evaluation, but a missing merged variant is an error.
eval::EvaluationReport run_hunting_eval(const BenchmarkEntry& entry, const std::filesystem::path& assertions,
                                        eval::Mode mode, const CampaignConfig& cfg);

struct SummaryRow {
  std::string id;
  std::string group;
  std::size_t loc = 0;
  double syntax = 0;
  std::size_t validated = 0;
  std::size_t total = 0;
  double coi = 0;
  double kill = 0;
};

struct GroupRow {
  std::string group;
  std::size_t designs = 0;
  double avg_loc = 0;
  double syntax = 0;
  double coi = 0;
  double kill = 0;
};

struct Summary {
  std::string mode;
  std::vector<SummaryRow> rows;
  std::vector<GroupRow> groups;
};

/// Reads `reports/<mode>.txt` of every indexed entry that has one.
Summary summarize(const std::filesystem::path& workspace, const std::string& mode);
std::string format_summary(const Summary& s);

}  // namespace rtlmut::campaign
