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
#include "rtlmut/mut/mutate.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/util/kv.hpp"

namespace rtlmut::pipeline {

enum class Status : std::uint8_t { Candidate, Duplicate, Equivalent, Invalid, Retained };
const char* status_name(Status s);
Status status_from_name(const std::string& name);

class OverlappingEdits : public std::runtime_error {
 public:
  OverlappingEdits(const std::string& a, const std::string& b)
      : std::runtime_error("overlapping edits " + a + " and " + b), first(a), second(b) {}
  std::string first;
  std::string second;
};

class MergeInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MutantRecord {
  std::string mutant_id;
  mut::Candidate cand;
  hdl::EditRecord edit;
  Status status = Status::Candidate;
  std::string verdict;  // "", equivalent, distinguished, unknown
  std::optional<sim::Witness> witness;
  std::string note;
  std::string mutated_text;  // full text of the edited file; not in the manifest

  std::string signal_key() const { return cand.target.module + "." + cand.target.signal; }
};

/// Deterministic id from the design id, target and edit.
std::string mutant_id(const std::string& design_id, const mut::Candidate& cand, const hdl::EditRecord& edit);

/// Marks later records with an equal (operator, file, line, after) as
/// duplicates. Records already past the candidate stage are left alone.
void dedup(std::vector<MutantRecord>& records);

/// Indices of the selected records, in selection order. The first pass takes
/// the first record of each distinct signal; later passes cycle over the
/// signals in first-seen order.
std::vector<std::size_t> select_budget(const std::vector<MutantRecord>& records, std::size_t budget);

struct PipelineConfig {
  std::size_t budget = 20;
  double overgen = 1.5;
  std::uint64_t seed = 1;
  sim::EquivalenceOptions equiv;
  mut::MutationConfig mutation;
  bool retain_unknown = false;
  unsigned workers = 1;
  std::size_t batch = 32;
};

std::size_t pool_target(const PipelineConfig& cfg);

struct MergedVariant {
  std::string id;
  std::vector<std::string> constituents;
  std::map<std::string, std::string> texts;  // changed files only
  std::size_t diff_sites = 0;
  std::vector<std::string> diverging;  // constituents whose witness still diverges
  std::vector<std::string> masked;
};

/// Stacks five retained edits on the golden design. Throws OverlappingEdits
/// when two anchors nest or share an edited child list, MergeInvalid when
/// the result does not reparse, elaborate or diff at five sites.
MergedVariant compose_multibug(const elab::Design& golden, const std::vector<const MutantRecord*>& parts,
                               const mut::MutationConfig& cfg);

struct CorpusResult {
  std::string design_id;
  std::vector<MutantRecord> records;  // generation order
  std::vector<std::size_t> retained;  // selection order
  std::optional<MergedVariant> merged;
  std::size_t candidates = 0;
  std::size_t probed = 0;
  std::size_t infeasible = 0;
  std::size_t pool = 0;
  std::vector<std::string> log;
};

/// Probes candidates in seeded round-robin order over targets, in fixed-size
/// batches, until the distinguished pool reaches pool_target or candidates
/// run out; then selects the budget and composes the five-bug variant.
CorpusResult generate_corpus(const elab::Design& golden, const elab::ConnectivityGraph& graph,
                             const std::vector<elab::MutationTarget>& targets, const PipelineConfig& cfg);

/// Re-checks a mutant: reparse, elaborate, and exactly one diff site that
/// matches its edit. Returns an empty string when valid, else the reason.
std::string revalidate(const elab::Design& golden, const MutantRecord& rec);

struct Manifest {
  util::KvBlock header;
  std::vector<MutantRecord> records;  // sorted by id
  std::optional<MergedVariant> merged;

  std::vector<const MutantRecord*> retained() const;
  const MutantRecord* find(const std::string& id) const;
};

std::string format_manifest(const CorpusResult& result, const elab::Design& golden, const util::KvBlock& config);
Manifest parse_manifest(const std::string& text);

/// Writes manifest.txt, mutants/<id>/ for each retained record and
/// mutants/merged_<id>/ for the five-bug variant.
void write_corpus(const CorpusResult& result, const elab::Design& golden, const util::KvBlock& config,
                  const std::filesystem::path& out_dir);

/// Writes a variant directory: every golden file, with `replaced` files
/// substituted.
void write_variant(const elab::Design& golden, const std::map<std::string, std::string>& replaced,
                   const std::filesystem::path& dir);

}  // namespace rtlmut::pipeline
