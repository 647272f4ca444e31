#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/pipeline/pipeline.hpp"
#include "rtlmut/sim/model.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
namespace fs = std::filesystem;

namespace {

pipeline::MutantRecord rec(const std::string& signal, const std::string& after = "x", std::uint32_t line = 1,
                           const std::string& op = "ASSIGN_CONST") {
  pipeline::MutantRecord r;
  r.cand.target = {"m", signal, "m.v"};
  r.edit.operator_id = op;
  r.edit.file = "m.v";
  r.edit.line = line;
  r.edit.after_fragment = after;
  return r;
}

struct CorpusDesign {
  elab::Design golden;
  elab::ConnectivityGraph graph;
  std::vector<elab::MutationTarget> targets;

  explicit CorpusDesign(const std::string& name) {
    const fs::path dir = fs::path(RTLMUT_CORPUS_DIR) / name;
    golden = elab::elaborate(elab::load_design_files(dir / "rtl"), "", name);
    graph = elab::build_connectivity(golden);
    targets = elab::resolve_targets(golden, graph, elab::classify_clock_reset(golden, graph),
                                    util::read_list(dir / "spec_signals.txt"));
  }
};

const pipeline::CorpusResult& fifo_corpus() {
  static const CorpusDesign d("sync_fifo");
  static const pipeline::CorpusResult r = [] {
    pipeline::PipelineConfig cfg;
    cfg.budget = 20;
    cfg.seed = 1;
    return pipeline::generate_corpus(d.golden, d.graph, d.targets, cfg);
  }();
  return r;
}

const CorpusDesign& fifo() {
  static const CorpusDesign d("sync_fifo");
  return d;
}

}  // namespace

TEST_CASE("pool target rounds up") {
  pipeline::PipelineConfig cfg;
  cfg.budget = 20;
  CHECK(pipeline::pool_target(cfg) == 30);
  cfg.budget = 7;
  CHECK(pipeline::pool_target(cfg) == 11);
  cfg.budget = 1;
  CHECK(pipeline::pool_target(cfg) == 2);
  cfg.overgen = 1.0;
  cfg.budget = 9;
  CHECK(pipeline::pool_target(cfg) == 9);
}

TEST_CASE("status names round-trip") {
  for (auto s : {pipeline::Status::Candidate, pipeline::Status::Duplicate, pipeline::Status::Equivalent,
                 pipeline::Status::Invalid, pipeline::Status::Retained}) {
    CHECK(pipeline::status_from_name(pipeline::status_name(s)) == s);
  }
}

TEST_CASE("dedup keeps the first of equal edits") {
  std::vector<pipeline::MutantRecord> rs{rec("a", "q <= 0;"), rec("b", "q <= 0;"), rec("a", "q <= 1;"),
                                         rec("a", "q <= 0;", 2), rec("a", "q <= 0;", 1, "ASSIGN_DUP")};
  pipeline::dedup(rs);
  CHECK(rs[0].status == pipeline::Status::Candidate);
  CHECK(rs[1].status == pipeline::Status::Duplicate);
  CHECK(rs[2].status == pipeline::Status::Candidate);
  CHECK(rs[3].status == pipeline::Status::Candidate);
  CHECK(rs[4].status == pipeline::Status::Candidate);
}

TEST_CASE("selection with as many signals as budget is all distinct") {
  std::vector<pipeline::MutantRecord> rs;
  for (int i = 0; i < 25; ++i) rs.push_back(rec("s" + std::to_string(i)));
  const auto sel = pipeline::select_budget(rs, 25);
  REQUIRE(sel.size() == 25);
  std::set<std::string> sigs;
  for (auto i : sel) sigs.insert(rs[i].signal_key());
  CHECK(sigs.size() == 25);
}

TEST_CASE("selection over fewer signals cycles after one pass") {
  std::vector<pipeline::MutantRecord> rs;
  for (int i = 0; i < 30; ++i) rs.push_back(rec("s" + std::to_string(i % 8)));
  const auto sel = pipeline::select_budget(rs, 20);
  REQUIRE(sel.size() == 20);
  std::set<std::string> first;
  for (std::size_t k = 0; k < 8; ++k) first.insert(rs[sel[k]].signal_key());
  CHECK(first.size() == 8);
  for (std::size_t k = 0; k < 20; ++k) CHECK(rs[sel[k]].signal_key() == "m.s" + std::to_string(k % 8));
}

TEST_CASE("first pass is distinct for every pool of at most 30") {
  util::SplitMix rng(7);
  for (std::size_t n = 1; n <= 30; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<pipeline::MutantRecord> rs;
        for (std::size_t i = 0; i < k; ++i) rs.push_back(rec("s" + std::to_string(i)));
        for (std::size_t i = k; i < n; ++i) rs.push_back(rec("s" + std::to_string(rng.below(k))));
        std::shuffle(rs.begin(), rs.end(), rng);
        for (std::size_t b = 1; b <= n; ++b) {
          const auto sel = pipeline::select_budget(rs, b);
          REQUIRE(sel.size() == b);
          REQUIRE(std::set<std::size_t>(sel.begin(), sel.end()).size() == b);
          const std::size_t head = std::min(b, k);
          std::set<std::string> sigs;
          for (std::size_t i = 0; i < head; ++i) sigs.insert(rs[sel[i]].signal_key());
          REQUIRE(sigs.size() == head);
        }
      }
    }
  }
}

TEST_CASE("corpus generation fills the budget with valid replayable mutants") {
  const auto& r = fifo_corpus();
  const auto& d = fifo();
  REQUIRE(r.retained.size() == 20);
  CHECK(r.pool >= 30);
  const auto golden_model = sim::Model::compile(d.golden);
  for (auto i : r.retained) {
    const auto& m = r.records[i];
    INFO(m.mutant_id);
    CHECK(m.status == pipeline::Status::Retained);
    CHECK(pipeline::revalidate(d.golden, m).empty());
    REQUIRE(m.witness);
    const auto mutant = elab::rebuild(d.golden, {{m.edit.file, m.mutated_text}});
    CHECK(sim::replay_witness(golden_model, sim::Model::compile(mutant), *m.witness));
  }
  REQUIRE(r.merged);
  CHECK(r.merged->constituents.size() == 5);
  CHECK(r.merged->diff_sites == 5);
  bool saw_pool_line = false;
  for (const auto& l : r.log) saw_pool_line = saw_pool_line || l.find("pool_target = 30") != std::string::npos;
  CHECK(saw_pool_line);
}

TEST_CASE("revalidate rejects a corrupted mutant") {
  const auto& r = fifo_corpus();
  auto m = r.records[r.retained.front()];
  auto broken = m;
  broken.mutated_text += "\nmodule";
  CHECK_FALSE(pipeline::revalidate(fifo().golden, broken).empty());
  auto golden_copy = m;
  golden_copy.mutated_text = fifo().golden.files[fifo().golden.file_index(m.edit.file)].source.text();
  CHECK_FALSE(pipeline::revalidate(fifo().golden, golden_copy).empty());
}

TEST_CASE("stacking the same edit twice is an overlap") {
  const auto& r = fifo_corpus();
  const auto* a = &r.records[r.retained[0]];
  CHECK_THROWS_AS(pipeline::compose_multibug(fifo().golden, {a, a}, {}), pipeline::OverlappingEdits);
}

TEST_CASE("manifest round-trips and generation is deterministic") {
  const auto& d = fifo();
  util::KvBlock cfg;
  cfg.add("seed", "1");
  const auto text = pipeline::format_manifest(fifo_corpus(), d.golden, cfg);
  const auto m = pipeline::parse_manifest(text);
  CHECK(m.retained().size() == 20);
  REQUIRE(m.merged);
  CHECK(m.merged->constituents == fifo_corpus().merged->constituents);
  for (const auto* x : m.retained()) {
    REQUIRE(x->witness);
    CHECK(x->edit.after_fragment != x->edit.before_fragment);
  }

  pipeline::PipelineConfig pc;
  pc.budget = 20;
  pc.seed = 1;
  pc.workers = 4;
  const auto again = pipeline::generate_corpus(d.golden, d.graph, d.targets, pc);
  CHECK(pipeline::format_manifest(again, d.golden, cfg) == text);
  pc.seed = 2;
  const auto other = pipeline::generate_corpus(d.golden, d.graph, d.targets, pc);
  CHECK(pipeline::format_manifest(other, d.golden, cfg) != text);
}
