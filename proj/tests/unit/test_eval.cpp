#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/eval/eval.hpp"
#include "rtlmut/sim/model.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
namespace fs = std::filesystem;

namespace {

eval::RunMetrics run_with(const std::string& label, std::set<std::string> killed, std::size_t variants = 20) {
  eval::RunMetrics m;
  m.label = label;
  m.killed = std::move(killed);
  m.variants = variants;
  m.nodes = 10;
  return m;
}

std::set<std::string> reach(const std::map<std::string, std::vector<std::string>>& fanin,
                            const std::vector<std::string>& roots) {
  std::set<std::string> seen;
  std::function<void(const std::string&)> dfs = [&](const std::string& n) {
    if (!seen.insert(n).second) return;
    auto it = fanin.find(n);
    if (it == fanin.end()) return;
    for (const auto& m : it->second) dfs(m);
  };
  for (const auto& r : roots) dfs(r);
  return seen;
}

std::vector<sva::Property> props_over(const std::vector<std::string>& sigs) {
  std::string text;
  for (const auto& s : sigs) text += "assert property (@(posedge clk) " + s + " == " + s + ");\n";
  return sva::parse_sva(text).properties;
}

const char* kCounter = R"(module cnt (
  input            clk,
  input            rst,
  input            en,
  output reg [3:0] q,
  output           wrap
);
  always @(posedge clk) begin
    if (rst)
      q <= 4'd0;
    else if (en)
      q <= q + 4'd1;
  end
  assign wrap = en && (q == 4'd15);
endmodule
)";

}  // namespace

TEST_CASE("worked aggregation example") {
  std::vector<eval::RunMetrics> runs{run_with("run1", {"v1", "v2"}), run_with("run2", {"v2", "v3"}),
                                     run_with("run3", {})};
  const auto avg = eval::aggregate(runs, eval::Mode::Average, 3);
  CHECK(avg.kill_ratio == doctest::Approx(4.0 / 60.0));
  CHECK(util::format_fixed(avg.kill_ratio) == "0.0667");
  const auto uni = eval::aggregate(runs, eval::Mode::Union, 3);
  CHECK(uni.kill_ratio == doctest::Approx(0.15));
  CHECK(uni.killed == std::set<std::string>{"v1", "v2", "v3"});
  CHECK_THROWS_AS(eval::aggregate(runs, eval::Mode::Union, 2), eval::RunCountMismatch);
  CHECK(eval::aggregate(std::vector<eval::RunMetrics>(3, run_with("r", {"v1"})), eval::Mode::Average, 3).kill_ratio ==
        doctest::Approx(0.05));
}

TEST_CASE("union dominates every run and identical runs agree") {
  util::SplitMix rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<eval::RunMetrics> runs;
    for (int r = 0; r < 3; ++r) {
      std::set<std::string> k, cone;
      for (int v = 0; v < 20; ++v) {
        if (rng.below(4) == 0) k.insert("v" + std::to_string(v));
      }
      auto m = run_with("run" + std::to_string(r + 1), k);
      for (int n = 0; n < 10; ++n) {
        if (rng.below(3) == 0) cone.insert("n" + std::to_string(n));
      }
      m.cone = cone;
      runs.push_back(m);
    }
    const auto uni = eval::aggregate(runs, eval::Mode::Union, 3);
    for (const auto& m : runs) {
      CHECK(uni.kill_ratio >= m.kill_ratio());
      CHECK(uni.coi >= m.coi());
    }
    const std::vector<eval::RunMetrics> same(3, runs[0]);
    const auto a = eval::aggregate(same, eval::Mode::Average, 3);
    const auto u = eval::aggregate(same, eval::Mode::Union, 3);
    CHECK(a.kill_ratio == doctest::Approx(u.kill_ratio));
    CHECK(a.coi == doctest::Approx(u.coi));
  }
}

TEST_CASE("syntax and validated figures are overall proportions in both modes") {
  std::vector<eval::RunMetrics> runs(3);
  runs[0].statements = 4, runs[0].parsed = 4, runs[0].validated = 3;
  runs[1].statements = 6, runs[1].parsed = 3, runs[1].validated = 1;
  runs[2].statements = 0;
  for (auto mode : {eval::Mode::Average, eval::Mode::Union}) {
    const auto a = eval::aggregate(runs, mode, 3);
    CHECK(a.syntax_rate == doctest::Approx(0.7));
    CHECK(a.validated == 4);
    CHECK(a.total == 7);
  }
}

TEST_CASE("run directories are counted") {
  const fs::path root = fs::temp_directory_path() / "rtlmut_eval_runs";
  fs::remove_all(root);
  fs::create_directories(root);
  CHECK_THROWS_AS(eval::load_runs(root / "missing", 3), eval::MissingAssertionRuns);
  CHECK(eval::load_runs(root, 3).size() == 3);
  for (const char* r : {"run1", "run2"}) fs::create_directories(root / r);
  util::write_file(root / "run1" / "a.sva", "assert property (@(posedge clk) a);\nassert property (@(posedge clk) );\n");
  CHECK_THROWS_AS(eval::load_runs(root, 3), eval::RunCountMismatch);
  fs::create_directories(root / "run3");
  const auto runs = eval::load_runs(root, 3);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].statements() == 2);
  CHECK(runs[0].parsed() == 1);
  CHECK(runs[2].statements() == 0);
  fs::remove_all(root);
}

TEST_CASE("cone coverage on the twelve-signal fixture") {
  const auto d = elab::elaborate(elab::load_design_files(std::string(RTLMUT_FIXTURE_DIR) + "/coi12"), "coi12");
  const auto g = elab::build_connectivity(d);
  REQUIRE(g.nodes.size() == 12);
  const std::map<std::string, std::vector<std::string>> fanin{
      {"p", {"a", "b"}}, {"q", {"p", "c"}}, {"s", {"c"}}, {"t", {"s", "r"}},
      {"x", {"q"}},      {"y", {"t"}},      {"u", {"b", "c"}}, {"r", {"p"}}};
  for (const auto& sigs : std::vector<std::vector<std::string>>{{"q"}, {"x"}, {"u"}, {"q", "u"}, {"p", "s"}}) {
    const auto ps = props_over(sigs);
    std::vector<const sva::Property*> ptrs;
    for (const auto& p : ps) ptrs.push_back(&p);
    auto want = reach(fanin, sigs);
    const auto cone = eval::property_cone(ptrs, g);
    for (const auto& n : want) CHECK(cone.count(n));
    // clk is referenced by the clocking event and is itself a node.
    want.insert("clk");
    CHECK(cone == want);
    CHECK(eval::coi_coverage(ptrs, g) == doctest::Approx(double(want.size()) / 12.0));
  }
  CHECK(eval::coi_coverage({}, g) == 0.0);
}

TEST_CASE("cone coverage equals reachability on random graphs") {
  util::SplitMix rng(17);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t inputs = 2 + rng.below(6);
    const std::size_t wires = 5 + rng.below(40);
    std::string text = "module g(input clk";
    for (std::size_t i = 0; i < inputs; ++i) text += ", input i" + std::to_string(i);
    text += ", output o);\n";
    std::vector<std::string> names;
    for (std::size_t i = 0; i < inputs; ++i) names.push_back("i" + std::to_string(i));
    std::map<std::string, std::vector<std::string>> fanin;
    for (std::size_t w = 0; w < wires; ++w) {
      const std::string n = "w" + std::to_string(w);
      const std::size_t k = 1 + rng.below(3);
      std::string rhs;
      for (std::size_t j = 0; j < k; ++j) {
        const auto& src = names[rng.below(names.size())];
        fanin[n].push_back(src);
        rhs += (j ? " ^ " : "") + src;
      }
      text += "  wire " + n + ";\n  assign " + n + " = " + rhs + ";\n";
      names.push_back(n);
    }
    text += "  assign o = " + names.back() + ";\nendmodule\n";
    fanin["o"] = {names.back()};
    const auto d = elab::elaborate({elab::make_design_file("g.v", text)}, "g");
    const auto g = elab::build_connectivity(d);
    REQUIRE(g.nodes.size() == inputs + wires + 2);
    REQUIRE(g.nodes.size() <= 50);
    std::vector<std::string> roots;
    for (int r = 0; r < 3; ++r) roots.push_back(names[rng.below(names.size())]);
    const auto ps = props_over(roots);
    std::vector<const sva::Property*> ptrs;
    for (const auto& p : ps) ptrs.push_back(&p);
    auto want = reach(fanin, roots);
    want.insert("clk");
    CHECK(eval::property_cone(ptrs, g) == want);
    CHECK(eval::coi_coverage(ptrs, g) == doctest::Approx(double(want.size()) / double(g.nodes.size())));
  }
}

TEST_CASE("golden validation classes") {
  const auto d = elab::elaborate({elab::make_design_file("cnt.v", kCounter)}, "cnt", "cnt");
  const auto model = sim::Model::compile(d);
  eval::EvalConfig cfg;
  cfg.sim_cycles = 64;
  const auto traces = sim::simulate_all(model, eval::validation_suite(model, cfg), 1);
  REQUIRE(traces.size() == cfg.vectors);
  auto set = sva::parse_sva(R"(
taut: assert property (@(posedge clk) 1'b1 |-> 1'b1);
cex: assert property (@(posedge clk) en |=> q == 4'd0);
vac: assert property (@(posedge clk) q == 4'd3 && rst && !rst |-> wrap);
step: assert property (@(posedge clk) disable iff (rst) en |=> q == $past(q) + 4'd1);
)");
  REQUIRE(set.properties.size() == 4);
  std::vector<eval::PropertyRef> refs;
  for (const auto& p : set.properties) refs.push_back({"run1", &p});
  const auto v1 = eval::validate_on_golden(refs, traces, 1);
  const auto v4 = eval::validate_on_golden(refs, traces, 4);
  REQUIRE(v1.size() == 4);
  CHECK(v1[0].verdict == eval::Verdict::Validated);
  CHECK(v1[1].verdict == eval::Verdict::Cex);
  CHECK(v1[2].verdict == eval::Verdict::Undetermined);
  CHECK(v1[3].verdict == eval::Verdict::Validated);
  CHECK(v1[0].key == "run1/taut");
  for (std::size_t i = 0; i < 4; ++i) CHECK(v1[i].verdict == v4[i].verdict);
}

TEST_CASE("kill table equals a direct property by variant loop") {
  const auto golden = elab::elaborate({elab::make_design_file("cnt.v", kCounter)}, "cnt", "cnt");
  const fs::path root = fs::temp_directory_path() / "rtlmut_eval_variants";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> edits{
      {"q + 4'd1", "q + 4'd2"}, {"q == 4'd15", "q == 4'd14"}, {"else if (en)", "else if (!en)"},
      {"q <= 4'd0", "q <= 4'd1"}, {"en && (q", "en || (q"}};
  std::vector<eval::Variant> variants;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    std::string text = kCounter;
    text.replace(text.find(edits[i].first), edits[i].first.size(), edits[i].second);
    const auto id = "v" + std::to_string(i);
    util::write_file(root / id / "cnt.v", text);
    variants.push_back({id, root / id});
  }
  variants.push_back({"gone", root / "gone"});
  auto set = sva::parse_sva(R"(
step: assert property (@(posedge clk) disable iff (rst) en |=> q == $past(q) + 4'd1);
hold: assert property (@(posedge clk) disable iff (rst) !en |=> $stable(q));
wrap: assert property (@(posedge clk) wrap |-> q == 4'd15);
rst0: assert property (@(posedge clk) rst |=> q == 4'd0);
)");
  std::vector<eval::PropertyRef> refs;
  for (const auto& p : set.properties) refs.push_back({"run1", &p});
  const auto model = sim::Model::compile(golden);
  eval::EvalConfig cfg;
  cfg.sim_cycles = 80;
  const auto suite = eval::validation_suite(model, cfg);
  const auto out1 = eval::evaluate_variants(golden, variants, refs, suite, 1);
  const auto out8 = eval::evaluate_variants(golden, variants, refs, suite, 8);
  REQUIRE(out1.size() == variants.size());
  CHECK(out1.back().error);
  for (std::size_t v = 0; v + 1 < variants.size(); ++v) {
    INFO(variants[v].id);
    CHECK_FALSE(out1[v].error);
    const auto vm = sim::Model::compile(elab::elaborate(elab::load_design_files(variants[v].dir), "cnt"));
    std::set<std::string> want;
    for (const auto& r : refs) {
      for (const auto& s : suite) {
        if (sva::check_on_trace(*r.prop, sim::simulate(vm, s)).kind == sva::MonitorResult::Kind::Violation) {
          want.insert(r.key());
        }
      }
    }
    CHECK(out1[v].violated == want);
    CHECK(out8[v].violated == want);
    CHECK_FALSE(want.empty());
  }
  fs::remove_all(root);
}

TEST_CASE("five-bug attribution needs the single-bug variant") {
  eval::VariantOutcome merged{"m", false, "", {"r/p1", "r/p4", "s/p9"}};
  eval::VariantOutcome s1{"a", false, "", {"r/p1"}};
  eval::VariantOutcome s2{"b", false, "", {}};
  eval::VariantOutcome s3{"c", false, "", {"r/p2"}};
  eval::VariantOutcome s4{"d", true, "missing", {}};
  eval::VariantOutcome s5{"e", false, "", {"s/p9"}};
  const std::vector<std::pair<std::string, const eval::VariantOutcome*>> singles{
      {"a", &s1}, {"b", &s2}, {"c", &s3}, {"d", &s4}, {"e", &s5}};
  const auto all = eval::attribute("m", merged, singles, {"r/p1", "r/p2", "r/p4", "s/p9"});
  CHECK(all.merged_violated);
  CHECK(all.attributed == 3);
  CHECK(all.unattributed == 1);
  CHECK(all.kill_ratio() == doctest::Approx(0.6));
  const auto only_r = eval::attribute("m", merged, singles, {"r/p1", "r/p2", "r/p4"});
  CHECK(only_r.attributed == 2);
  CHECK(only_r.unattributed == 1);
  eval::VariantOutcome clean{"m", false, "", {}};
  const auto none = eval::attribute("m", clean, singles, {"r/p1", "r/p2", "r/p4", "s/p9"});
  CHECK_FALSE(none.merged_violated);
  CHECK(none.attributed == 0);
  CHECK(none.kill_ratio() == 0.0);
}

TEST_CASE("mode names") {
  CHECK(eval::mode_from_name("average") == eval::Mode::Average);
  CHECK(eval::mode_from_name("union") == eval::Mode::Union);
  CHECK_THROWS(eval::mode_from_name("median"));
  CHECK(std::string(eval::verdict_name(eval::Verdict::Cex)) == "cex");
}
