#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "rtlmut/campaign/campaign.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = RTLMUT_CORPUS_DIR;
const fs::path kFixtures = RTLMUT_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rtlmut_campaign_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string tree_text(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += fs::relative(f, root).string() + "\n" + util::read_file(f) + "\n";
  return out;
}

}  // namespace

TEST_CASE("ingest gates") {
  const auto ws = scratch("ingest");
  const auto short_design = campaign::ingest(kFixtures / "short150", "short150", ws);
  CHECK_FALSE(short_design.entry);
  CHECK(short_design.reason.rfind("loc<200", 0) == 0);
  const auto unresolved = campaign::ingest(kFixtures / "unresolved", "unresolved_top", ws);
  CHECK_FALSE(unresolved.entry);
  CHECK(unresolved.reason.rfind("elaboration failure", 0) == 0);
  CHECK(campaign::check_design(kFixtures / "nowhere", "x") == "design directory not found");

  const auto ok = campaign::ingest(kCorpus / "rr_arbiter", "", ws);
  REQUIRE(ok.entry);
  CHECK(ok.entry->top == "arb_top");
  CHECK(ok.entry->group == "control");
  CHECK(ok.entry->loc >= 200);
  CHECK(fs::exists(ok.entry->spec_signals()));
  CHECK(fs::exists(ok.entry->spec()));
  const auto index = campaign::load_index(ws);
  REQUIRE(index.size() == 1);
  CHECK(index[0].id == "rr_arbiter");
  const auto again = campaign::load_entry(ws, "rr_arbiter");
  CHECK(again.loc == ok.entry->loc);
  CHECK(campaign::load_golden(again).top == "arb_top");
  fs::remove_all(ws);
}

TEST_CASE("config file, overrides and validation") {
  const auto dir = scratch("config");
  util::write_file(dir / "c.cfg", "# campaign\nbudget = 12\novergen_factor = 2\nseed = 9\nworkers = 3\nstrict = true\n");
  campaign::CampaignConfig cfg;
  cfg.load(dir / "c.cfg");
  CHECK(cfg.budget == 12);
  CHECK(cfg.overgen == 2.0);
  CHECK(cfg.seed == 9);
  CHECK(cfg.strict);
  cfg.set("budget", "15");
  CHECK(cfg.budget == 15);
  CHECK(cfg.pipeline().budget == 15);
  CHECK(cfg.evaluation().runs == 3);
  const auto snap = cfg.snapshot();
  CHECK(snap.get("budget") == "15");
  CHECK_FALSE(snap.get("workers"));
  auto other = cfg;
  other.workers = 8;
  CHECK(util::format_kv({{"", other.snapshot()}}) == util::format_kv({{"", snap}}));

  campaign::CampaignConfig bad;
  CHECK_THROWS_AS(bad.set("nonsense", "1"), campaign::ConfigError);
  CHECK_THROWS_AS(bad.set("budget", "many"), campaign::ConfigError);
  bad.set("budget", "0");
  CHECK_THROWS_AS(bad.validate(), campaign::ConfigError);
  bad.set("budget", "5");
  bad.set("overgen", "0.5");
  CHECK_THROWS_AS(bad.validate(), campaign::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("mutate and evaluate are reproducible") {
  campaign::CampaignConfig cfg;
  cfg.budget = 20;
  cfg.seed = 1;
  std::vector<std::string> trees;
  std::vector<std::string> reports;
  for (unsigned workers : {1u, 4u}) {
    const auto ws = scratch("repro" + std::to_string(workers));
    const auto ing = campaign::ingest(kCorpus / "alu_pipe", "", ws);
    REQUIRE(ing.entry);
    cfg.workers = workers;
    const auto r = campaign::run_mutate(*ing.entry, cfg);
    CHECK(r.retained.size() == 20);
    REQUIRE(r.merged);
    trees.push_back(tree_text(ing.entry->root));
    for (auto mode : {eval::Mode::Average, eval::Mode::Union}) {
      const auto rep = campaign::run_prevention_eval(*ing.entry, kCorpus / "alu_pipe" / "assertions", mode, cfg);
      reports.push_back(eval::format_report(rep) + eval::format_table(rep));
      CHECK(rep.hunting_union.has_value());
    }
    fs::remove_all(ws);
  }
  CHECK(trees[0] == trees[1]);
  CHECK(reports[0] == reports[2]);
  CHECK(reports[1] == reports[3]);
}

TEST_CASE("evaluation of an empty assertion directory is all zero") {
  const auto ws = scratch("empty");
  const auto ing = campaign::ingest(kCorpus / "traffic_ctrl", "", ws);
  REQUIRE(ing.entry);
  campaign::CampaignConfig cfg;
  campaign::run_mutate(*ing.entry, cfg);
  fs::create_directories(ws / "assertions");
  const auto rep = campaign::run_prevention_eval(*ing.entry, ws / "assertions", eval::Mode::Union, cfg);
  CHECK(rep.overall.syntax_rate == 0.0);
  CHECK(rep.overall.total == 0);
  CHECK(rep.overall.coi == 0.0);
  CHECK(rep.overall.kill_ratio == 0.0);
  CHECK(rep.hunting_ratio == 0.0);
  CHECK_THROWS_AS(campaign::run_prevention_eval(*ing.entry, ws / "nothing", eval::Mode::Union, cfg),
                  eval::MissingAssertionRuns);
  fs::remove_all(ws);
}

TEST_CASE("missing manifest and strict under-fill") {
  const auto ws = scratch("strict");
  const auto ing = campaign::ingest(kCorpus / "sync_fifo", "", ws);
  REQUIRE(ing.entry);
  campaign::CampaignConfig cfg;
  CHECK_THROWS_AS(campaign::run_prevention_eval(*ing.entry, kCorpus / "sync_fifo" / "assertions", eval::Mode::Average, cfg),
                  campaign::MissingManifest);
  cfg.strict = true;
  cfg.budget = 500;
  CHECK_THROWS_AS(campaign::run_mutate(*ing.entry, cfg), campaign::Rejection);
  fs::remove_all(ws);
}

TEST_CASE("merge recomposes the manifest quintuple") {
  const auto ws = scratch("merge");
  const auto ing = campaign::ingest(kCorpus / "sync_fifo", "", ws);
  REQUIRE(ing.entry);
  campaign::CampaignConfig cfg;
  const auto r = campaign::run_mutate(*ing.entry, cfg);
  REQUIRE(r.merged);
  const auto mv = campaign::run_merge(*ing.entry, {}, cfg, ws / "remerged");
  CHECK(mv.id == r.merged->id);
  CHECK(tree_text(ws / "remerged") == tree_text(ing.entry->mutants_dir() / ("merged_" + mv.id)));
  CHECK_THROWS_AS(campaign::run_merge(*ing.entry, {"0000000000000000"}, cfg), campaign::Rejection);
  fs::remove_all(ws);
}
