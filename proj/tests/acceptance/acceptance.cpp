// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rtlmut/campaign/campaign.hpp"
#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/eval/eval.hpp"
#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/hdl/transform.hpp"
#include "rtlmut/mut/mutate.hpp"
#include "rtlmut/pipeline/pipeline.hpp"
#include "rtlmut/sim/model.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/sva/sva.hpp"
#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = RTLMUT_CORPUS_DIR;
const fs::path kFixtures = RTLMUT_FIXTURE_DIR;
const std::vector<std::string> kDesigns{"alu_pipe", "rr_arbiter", "sync_fifo", "traffic_ctrl"};

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void fail(const std::string& why) {
    if (ok) note.str("");
    if (ok || note.str().size() < 400) note << (note.str().empty() ? "" : "; ") << why;
    ok = false;
  }
};

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rtlmut_acceptance_" + name);
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

campaign::CampaignConfig default_config() {
  campaign::CampaignConfig cfg;
  cfg.budget = 20;
  cfg.seed = 1;
  cfg.workers = 4;
  return cfg;
}

/// Shared workspace with all corpus designs mutated once.
struct Workspace {
  fs::path root;
  std::map<std::string, campaign::BenchmarkEntry> entries;
  std::map<std::string, double> seconds;
  std::map<std::string, pipeline::CorpusResult> results;
};

Workspace& workspace() {
  static Workspace ws = [] {
    Workspace w;
    w.root = scratch("corpus");
    const auto cfg = default_config();
    for (const auto& d : kDesigns) {
      const auto ing = campaign::ingest(kCorpus / d, "", w.root);
      if (!ing.entry) throw std::runtime_error(d + " rejected: " + ing.reason);
      const auto t0 = std::chrono::steady_clock::now();
      w.results[d] = campaign::run_mutate(*ing.entry, cfg);
      w.seconds[d] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      w.entries[d] = *ing.entry;
    }
    return w;
  }();
  return ws;
}

// Corpus of four designs, budget 20 plus a five-bug variant each, every
// retained mutant reparses, elaborates and has a witness that replays.
Outcome corpus_generation() {
  Outcome o;
  auto& ws = workspace();
  std::size_t checked = 0;
  for (const auto& d : kDesigns) {
    const auto& e = ws.entries.at(d);
    if (e.loc < 200 || e.loc > 600) o.fail(d + " loc " + std::to_string(e.loc));
    if (ws.seconds.at(d) > 120.0) o.fail(d + " took " + std::to_string(ws.seconds.at(d)) + "s");
    const auto golden = campaign::load_golden(e);
    const auto gmodel = sim::Model::compile(golden);
    const auto m = pipeline::parse_manifest(util::read_file(e.manifest()));
    const auto retained = m.retained();
    if (retained.size() != 20) o.fail(d + " retained " + std::to_string(retained.size()));
    if (!m.merged || m.merged->constituents.size() != 5) o.fail(d + " has no five-bug variant");
    for (const auto* r : retained) {
      const fs::path dir = e.mutants_dir() / r->mutant_id;
      try {
        const auto files = elab::load_design_files(dir);
        const auto mutant = elab::elaborate(files, golden.top, r->mutant_id);
        std::vector<hdl::FileTree> gt, mt;
        for (const auto& f : golden.files) gt.push_back({f.path, f.ast.get()});
        for (const auto& f : mutant.files) mt.push_back({f.path, f.ast.get()});
        if (hdl::structural_diff(gt, mt).size() != 1) o.fail(r->mutant_id + " is not a single-site edit");
        if (!r->witness || !sim::replay_witness(gmodel, sim::Model::compile(mutant), *r->witness)) {
          o.fail(r->mutant_id + " witness does not replay");
        }
      } catch (const std::exception& ex) {
        o.fail(r->mutant_id + ": " + ex.what());
      }
      ++checked;
    }
    if (m.merged) {
      const auto merged = elab::elaborate(elab::load_design_files(e.mutants_dir() / ("merged_" + m.merged->id)),
                                          golden.top, "merged");
      std::vector<hdl::FileTree> gt, mt;
      for (const auto& f : golden.files) gt.push_back({f.path, f.ast.get()});
      for (const auto& f : merged.files) mt.push_back({f.path, f.ast.get()});
      if (hdl::structural_diff(gt, mt).size() != 5) o.fail(d + " five-bug variant is not five sites");
    }
  }
  if (o.ok) {
    double worst = 0;
    for (const auto& [_, s] : ws.seconds) worst = std::max(worst, s);
    o.note << "4 designs, " << checked << " mutants checked, slowest mutate " << util::format_fixed(worst, 2) << "s";
  }
  return o;
}

// pool_target in the log, distinct signals in the first selection pass, and
// the selection rule checked on every pool shape up to 30 records.
Outcome pool_and_selection() {
  Outcome o;
  auto& ws = workspace();
  for (const auto& d : kDesigns) {
    const auto& e = ws.entries.at(d);
    const auto log = util::read_file(e.root / "mutate.log");
    if (log.find("pool_target = 30") == std::string::npos) o.fail(d + " log lacks pool_target = 30");
    const auto m = pipeline::parse_manifest(util::read_file(e.manifest()));
    std::set<std::string> pool_signals;
    for (const auto& r : m.records) {
      if (r.verdict == "distinguished") pool_signals.insert(r.signal_key());
    }
    const auto order = util::split(*m.header.get("selection"), ',');
    const std::size_t head = std::min<std::size_t>(20, pool_signals.size());
    std::set<std::string> first;
    for (std::size_t i = 0; i < head && i < order.size(); ++i) first.insert(m.find(order[i])->signal_key());
    if (first.size() != head) o.fail(d + " first pass repeats a signal");
  }
  util::SplitMix rng(2024);
  std::size_t shapes = 0;
  for (std::size_t n = 1; n <= 30; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<pipeline::MutantRecord> rs(n);
      for (std::size_t i = 0; i < n; ++i) {
        rs[i].cand.target = {"m", "s" + std::to_string(i < k ? i : rng.below(k)), "m.v"};
      }
      std::shuffle(rs.begin(), rs.end(), rng);
      for (std::size_t b = 1; b <= n; ++b) {
        ++shapes;
        const auto sel = pipeline::select_budget(rs, b);
        std::set<std::string> sigs;
        for (std::size_t i = 0; i < std::min(b, k); ++i) sigs.insert(rs[sel[i]].signal_key());
        if (sel.size() != b || sigs.size() != std::min(b, k)) o.fail("pool n=" + std::to_string(n));
        if (b >= k) {
          std::set<std::string> all;
          for (auto i : sel) all.insert(rs[i].signal_key());
          if (all.size() != k) o.fail("not every signal selected at n=" + std::to_string(n));
        }
      }
    }
  }
  if (o.ok) o.note << "pool_target = 30 on 4 designs, " << shapes << " pool shapes";
  return o;
}

struct DesignUnderTest {
  elab::Design design;
  elab::ConnectivityGraph graph;
  std::vector<elab::MutationTarget> targets;
};

DesignUnderTest load_corpus_design(const std::string& d) {
  DesignUnderTest u;
  u.design = elab::elaborate(elab::load_design_files(kCorpus / d / "rtl"), "", d);
  u.graph = elab::build_connectivity(u.design);
  u.targets = elab::resolve_targets(u.design, u.graph, elab::classify_clock_reset(u.design, u.graph),
                                    util::read_list(kCorpus / d / "spec_signals.txt"));
  return u;
}

// Every applied mutant differs from the golden tree at exactly one site.
Outcome single_site_diff() {
  Outcome o;
  std::size_t total = 0, dups = 0;
  for (const auto& d : kDesigns) {
    const auto u = load_corpus_design(d);
    for (const auto& c : mut::match_candidates(u.design, u.graph, u.targets, {})) {
      const auto probe = mut::probe_apply(u.design, c, {});
      const auto* e = std::get_if<hdl::EditRecord>(&probe);
      if (!e) continue;
      try {
        const auto applied = mut::apply_operator(u.design, c, {}, *e);
        const auto& g = *u.design.files[u.design.file_index(c.file)].ast;
        const auto reparsed = hdl::parse_text(c.file, applied.text);
        const auto sites = hdl::structural_diff({{c.file, &g}}, {{c.file, &reparsed}});
        ++total;
        if (sites.size() != 1) {
          o.fail(c.describe() + " gives " + std::to_string(sites.size()) + " sites");
          continue;
        }
        if (c.op == mut::OperatorId::ASSIGN_DUP) {
          ++dups;
          if (sites[0].kind != hdl::EditKind::Insert) o.fail(c.describe() + " is not an insert");
        }
      } catch (const std::exception& ex) {
        o.fail(c.describe() + " threw: " + ex.what());
      }
    }
  }
  if (total < 500) o.fail("only " + std::to_string(total) + " mutants");
  if (o.ok) o.note << total << " mutants, " << dups << " ASSIGN_DUP inserts, 0 exceptions";
  return o;
}

std::string random_involution_design(util::SplitMix& rng) {
  static const char* rel[] = {"<", "<=", ">", ">=", "==", "!="};
  static const char* logic[] = {"&&", "||"};
  const std::uint64_t n = 6 + rng.below(7);
  const std::uint64_t w = 2 + rng.below(n - 2);
  auto slice = [&](const char* v) {
    const std::uint64_t lo = rng.below(n - 1);
    const std::uint64_t hi = lo + 1 + rng.below(n - 1 - lo);
    return std::string(v) + "[" + std::to_string(hi) + ":" + std::to_string(lo) + "]";
  };
  auto wslice = [&](const char* v) {
    const std::uint64_t lo = rng.below(n - w + 1);
    return std::string(v) + "[" + std::to_string(lo + w - 1) + ":" + std::to_string(lo) + "]";
  };
  std::ostringstream s;
  s << "module leaf #(parameter W = 2) (\n  input  [W-1:0] p0,\n  input  [W-1:0] p1,\n  input  [W-1:0] p2,\n"
    << "  output [W-1:0] o\n);\n  assign o = (p0 & ~p1) ^ p2;\nendmodule\n\n";
  s << "module top (\n  input clk,\n  input [" << n - 1 << ":0] a,\n  input [" << n - 1 << ":0] b,\n  input ["
    << n - 1 << ":0] c,\n  output [" << 2 * n - 1 << ":0] y0,\n  output y1,\n  output [" << w - 1
    << ":0] y2,\n  output reg [" << n - 1 << ":0] r\n);\n";
  s << "  wire [" << n - 1 << ":0] t;\n";
  s << "  wire [" << w - 1 << ":0] m;\n";
  s << "  assign t = " << slice("a") << " ^ " << slice("b") << ";\n";
  s << "  assign y0 = {" << slice("t") << ", " << slice("c") << "};\n";
  s << "  assign y1 = (" << slice("a") << " " << rel[rng.below(6)] << " " << slice("b") << ") "
    << logic[rng.below(2)] << " (c " << rel[rng.below(6)] << " t);\n";
  s << "  leaf #(.W(" << w << ")) u0 (.p0(" << wslice("a") << "), .p1(" << wslice("b") << "), .p2(" << wslice("c")
    << "), .o(m));\n";
  s << "  assign y2 = ~m;\n";
  s << "  always @(posedge clk) begin\n    if (" << slice("a") << " " << rel[rng.below(6)] << " " << slice("c")
    << ")\n      r <= " << slice("t") << ";\n    else\n      r <= b;\n  end\nendmodule\n";
  return s.str();
}

// Applying SLICE_MIRROR, PORT_SWAP or RELOP_SWAP twice restores the design.
Outcome involutions() {
  Outcome o;
  util::SplitMix rng(99);
  std::map<mut::OperatorId, std::size_t> done;
  for (auto op : {mut::OperatorId::SLICE_MIRROR, mut::OperatorId::PORT_SWAP, mut::OperatorId::RELOP_SWAP}) {
    mut::MutationConfig cfg;
    cfg.operators = {op};
    std::size_t attempts = 0;
    while (done[op] < 1000 && attempts++ < 5000) {
      const auto text = random_involution_design(rng);
      const auto design = elab::elaborate({elab::make_design_file("r.v", text)}, "top", "r");
      const auto graph = elab::build_connectivity(design);
      const auto targets = elab::resolve_targets(design, graph, elab::classify_clock_reset(design, graph),
                                                 {"y0", "y1", "y2", "r"});
      std::vector<mut::Candidate> cs;
      for (const auto& c : mut::match_candidates(design, graph, targets, cfg)) {
        if (std::holds_alternative<hdl::EditRecord>(mut::probe_apply(design, c, cfg))) cs.push_back(c);
      }
      if (cs.empty()) continue;
      const auto& c = cs[rng.below(cs.size())];
      const auto once = mut::apply_operator(design, c, cfg, std::get<hdl::EditRecord>(mut::probe_apply(design, c, cfg)));
      const auto mutant = elab::rebuild(design, {{"r.v", once.text}});
      const auto mgraph = elab::build_connectivity(mutant);
      const mut::Candidate* again = nullptr;
      std::vector<mut::Candidate> ms;
      for (const auto& t : targets) {
        if (t.signal != c.target.signal) continue;
        ms = mut::match_candidates(mutant, mgraph, {t}, cfg);
      }
      for (const auto& m : ms) {
        if (m.path == c.path && m.variant == c.variant) again = &m;
      }
      if (!again) {
        o.fail(std::string(mut::operator_name(op)) + " anchor lost after one application");
        ++done[op];
        continue;
      }
      const auto probe = mut::probe_apply(mutant, *again, cfg);
      const auto* e = std::get_if<hdl::EditRecord>(&probe);
      if (!e) {
        o.fail(std::string(mut::operator_name(op)) + " second application infeasible");
        ++done[op];
        continue;
      }
      const auto twice = mut::apply_operator(mutant, *again, cfg, *e);
      if (hdl::emit(twice.file_ast) != hdl::emit(hdl::sanitize(*design.files[0].ast))) {
        o.fail(std::string(mut::operator_name(op)) + " is not an involution on " + c.describe());
      }
      ++done[op];
    }
    if (done[op] < 1000) o.fail(std::string(mut::operator_name(op)) + " found only " + std::to_string(done[op]) + " cases");
  }
  if (o.ok) {
    o.note << "SLICE_MIRROR " << done[mut::OperatorId::SLICE_MIRROR] << ", PORT_SWAP "
           << done[mut::OperatorId::PORT_SWAP] << ", RELOP_SWAP " << done[mut::OperatorId::RELOP_SWAP] << " cases";
  }
  return o;
}

// Equivalence verdicts on small combinational fixtures against a direct
// sweep of every input combination.
Outcome equivalence_oracle() {
  Outcome o;
  std::size_t equal = 0, distinct = 0;
  for (const char* name : {"comb_alu4", "comb_prio8", "comb_sel14"}) {
    const auto design = elab::elaborate(elab::load_design_files(kFixtures / name), name, name);
    const auto graph = elab::build_connectivity(design);
    const auto gmodel = sim::Model::compile(design);
    std::vector<std::string> outs;
    for (const auto& ob : gmodel.observed()) {
      if (ob.top_output) outs.push_back(ob.name);
    }
    const auto targets = elab::resolve_targets(design, graph, elab::classify_clock_reset(design, graph), outs);
    const std::uint32_t bits = gmodel.data_input_bits();
    if (bits > 14 || gmodel.has_sequential()) o.fail(std::string(name) + " is not a small combinational design");
    for (const auto& c : mut::match_candidates(design, graph, targets, {})) {
      const auto probe = mut::probe_apply(design, c, {});
      const auto* e = std::get_if<hdl::EditRecord>(&probe);
      if (!e) continue;
      const auto applied = mut::apply_operator(design, c, {}, *e);
      std::optional<sim::Model> mmodel;
      try {
        mmodel = sim::Model::compile(elab::rebuild(design, {{c.file, applied.text}}));
      } catch (const std::exception&) {
        continue;
      }
      sim::Simulator gs(gmodel), ms(*mmodel);
      bool differs = false;
      for (std::uint64_t v = 0; v < (1ULL << bits) && !differs; ++v) {
        std::vector<std::uint64_t> in;
        std::uint64_t rest = v;
        for (const auto& p : gmodel.inputs()) {
          in.push_back(rest & ((1ULL << p.width) - 1));
          rest >>= p.width;
        }
        gs.apply_inputs(in);
        gs.settle();
        ms.apply_inputs(in);
        ms.settle();
        for (const auto& out : outs) differs = differs || gs.value(out) != ms.value(out);
      }
      const auto verdict = sim::check_equivalence(gmodel, *mmodel, {}).verdict;
      const auto want = differs ? sim::Equivalence::Distinguished : sim::Equivalence::Equivalent;
      if (verdict != want) {
        o.fail(std::string(name) + " " + c.describe() + ": got " + sim::equivalence_name(verdict));
      }
      (differs ? distinct : equal) += 1;
    }
  }
  if (equal + distinct < 50) o.fail("only " + std::to_string(equal + distinct) + " mutants compared");
  if (o.ok) o.note << equal + distinct << " mutants, " << equal << " equivalent, " << distinct << " distinguished";
  return o;
}

// Adder on every input pair, counter closed form, and trace determinism
// across repeats and worker counts.
Outcome simulator_checks() {
  Outcome o;
  const auto adder = sim::Model::compile(elab::elaborate(elab::load_design_files(kFixtures / "adder8"), "adder8"));
  sim::Simulator s(adder);
  std::size_t pairs = 0;
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::uint64_t b = 0; b < 256; ++b) {
      s.apply_inputs({a, b});
      s.settle();
      if (s.value("sum") != ((a + b) & 0xff) || s.value("cout") != ((a + b) >> 8)) o.fail("adder wrong");
      ++pairs;
    }
  }
  const auto counter = sim::Model::compile(elab::elaborate(elab::load_design_files(kFixtures / "counter4"), "counter4"));
  const auto t = sim::simulate(counter, sim::Stimulus::random(5, 4, 24));
  for (std::size_t k = 0; k < 20; ++k) {
    if (t.rows[4 + k][t.index("count")] != k % 16) o.fail("counter cycle " + std::to_string(k));
  }
  std::size_t traces = 0;
  for (const auto& d : kDesigns) {
    const auto model = sim::Model::compile(elab::elaborate(elab::load_design_files(kCorpus / d / "rtl"), "", d));
    std::vector<sim::Stimulus> stims;
    for (std::uint64_t k = 0; k < 8; ++k) stims.push_back(sim::Stimulus::random(util::mix_keys(1, k, 7), 4, 200));
    const auto base = sim::simulate_all(model, stims, 1);
    for (unsigned w : {1u, 4u, 8u}) {
      const auto other = sim::simulate_all(model, stims, w);
      for (std::size_t i = 0; i < stims.size(); ++i) {
        if (other[i].to_text() != base[i].to_text()) o.fail(d + " trace differs at workers " + std::to_string(w));
        ++traces;
      }
    }
  }
  if (o.ok) o.note << pairs << " adder pairs, 20 counter cycles, " << traces << " traces identical";
  return o;
}

struct Evaluated {
  eval::EvaluationReport average;
  eval::EvaluationReport uni;
};

std::map<std::string, Evaluated>& evaluations() {
  static std::map<std::string, Evaluated> out = [] {
    std::map<std::string, Evaluated> m;
    auto& ws = workspace();
    const auto cfg = default_config();
    for (const auto& d : kDesigns) {
      const auto& e = ws.entries.at(d);
      m[d].average = campaign::run_prevention_eval(e, kCorpus / d / "assertions", eval::Mode::Average, cfg);
      m[d].uni = campaign::run_prevention_eval(e, kCorpus / d / "assertions", eval::Mode::Union, cfg);
    }
    return m;
  }();
  return out;
}

// Kill tables against a direct (property x variant) loop, plus the worked
// aggregation example.
Outcome kill_tables() {
  Outcome o;
  auto& ws = workspace();
  const auto cfg = default_config();
  std::size_t pairs = 0;
  for (const auto& d : kDesigns) {
    const auto& e = ws.entries.at(d);
    const auto golden = campaign::load_golden(e);
    const auto gmodel = sim::Model::compile(golden);
    const auto m = pipeline::parse_manifest(util::read_file(e.manifest()));
    std::vector<sim::Witness> wits;
    for (const auto* r : m.retained()) wits.push_back(*r->witness);
    const auto suite = eval::evaluation_suite(gmodel, cfg.evaluation(), wits);
    std::vector<sim::Trace> gtraces;
    for (const auto& st : suite) gtraces.push_back(sim::simulate(gmodel, st));

    auto runs = eval::load_runs(kCorpus / d / "assertions", 3);
    std::vector<std::pair<std::string, const sva::Property*>> validated;
    for (auto& run : runs) {
      for (auto& set : run.sets) {
        sva::bind_signals(set, gtraces.front().signals);
        for (const auto& p : set.properties) {
          bool violated = false, passed = false;
          for (const auto& tr : gtraces) {
            const auto k = sva::check_on_trace(p, tr).kind;
            violated = violated || k == sva::MonitorResult::Kind::Violation;
            passed = passed || k == sva::MonitorResult::Kind::Pass;
          }
          if (passed && !violated) validated.push_back({run.label, &p});
        }
      }
    }
    std::map<std::string, std::vector<std::string>> want;
    for (const auto* r : m.retained()) {
      const auto vmodel = sim::Model::compile(
          elab::elaborate(elab::load_design_files(e.mutants_dir() / r->mutant_id), golden.top, r->mutant_id));
      std::vector<sim::Trace> vtraces;
      for (const auto& st : suite) vtraces.push_back(sim::simulate(vmodel, st));
      std::set<std::string> by;
      for (const auto& [label, p] : validated) {
        ++pairs;
        for (const auto& tr : vtraces) {
          if (sva::check_on_trace(*p, tr).kind == sva::MonitorResult::Kind::Violation) {
            by.insert(label);
            break;
          }
        }
      }
      want[r->mutant_id] = {by.begin(), by.end()};
    }
    for (const auto* rep : {&evaluations().at(d).average, &evaluations().at(d).uni}) {
      if (rep->kill_table.size() != want.size()) o.fail(d + " kill table size");
      for (const auto& row : rep->kill_table) {
        if (!want.count(row.variant) || want.at(row.variant) != row.killed_by) o.fail(d + " row " + row.variant);
      }
    }
  }
  std::vector<eval::RunMetrics> runs(3);
  const std::vector<std::set<std::string>> kills{{"v1", "v2"}, {"v2", "v3"}, {}};
  for (std::size_t i = 0; i < 3; ++i) {
    runs[i].label = "run" + std::to_string(i + 1);
    runs[i].killed = kills[i];
    runs[i].variants = 20;
  }
  const auto avg = eval::aggregate(runs, eval::Mode::Average, 3).kill_ratio;
  const auto uni = eval::aggregate(runs, eval::Mode::Union, 3).kill_ratio;
  if (util::format_fixed(avg) != "0.0667") o.fail("average " + util::format_fixed(avg));
  if (util::format_fixed(uni, 2) != "0.15") o.fail("union " + util::format_fixed(uni));
  if (o.ok) o.note << pairs << " property-variant pairs; example average " << util::format_fixed(avg) << ", union "
                   << util::format_fixed(uni, 2);
  return o;
}

// Union kill ratio and COI dominate every run.
Outcome union_monotonic() {
  Outcome o;
  for (const auto& d : kDesigns) {
    const auto& rep = evaluations().at(d).uni;
    for (const auto& r : rep.runs) {
      if (rep.overall.kill_ratio + 1e-12 < r.kill_ratio()) o.fail(d + " kill below " + r.label);
      if (rep.overall.coi + 1e-12 < r.coi()) o.fail(d + " coi below " + r.label);
      for (const auto& k : r.killed) {
        if (!rep.overall.killed.count(k)) o.fail(d + " union misses " + k);
      }
    }
    const auto& avg = evaluations().at(d).average;
    if (avg.overall.kill_ratio > rep.overall.kill_ratio + 1e-12) o.fail(d + " average above union");
    o.note << (o.note.str().empty() ? "" : ", ") << d << " kill " << util::format_fixed(rep.overall.kill_ratio, 2)
           << " coi " << util::format_fixed(rep.overall.coi, 2);
  }
  return o;
}

// COI against brute-force reachability on random DAGs.
Outcome coi_reachability() {
  Outcome o;
  util::SplitMix rng(31);
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t inputs = 2 + rng.below(6);
    const std::size_t wires = 5 + rng.below(40);
    std::ostringstream text;
    text << "module g(input clk";
    for (std::size_t i = 0; i < inputs; ++i) text << ", input i" << i;
    text << ", output o);\n";
    std::vector<std::string> names;
    for (std::size_t i = 0; i < inputs; ++i) names.push_back("i" + std::to_string(i));
    std::map<std::string, std::vector<std::string>> fanin;
    for (std::size_t w = 0; w < wires; ++w) {
      const std::string n = "w" + std::to_string(w);
      text << "  wire " << n << ";\n  assign " << n << " = ";
      const std::size_t k = 1 + rng.below(3);
      for (std::size_t j = 0; j < k; ++j) {
        const auto& src = names[rng.below(names.size())];
        fanin[n].push_back(src);
        text << (j ? " | " : "") << src;
      }
      text << ";\n";
      names.push_back(n);
    }
    text << "  assign o = " << names.back() << ";\nendmodule\n";
    fanin["o"] = {names.back()};
    const auto design = elab::elaborate({elab::make_design_file("g.v", text.str())}, "g");
    const auto graph = elab::build_connectivity(design);
    if (graph.nodes.size() > 50) o.fail("graph too large");
    std::vector<std::string> roots;
    std::string props;
    for (int r = 0; r < 2; ++r) {
      roots.push_back(names[rng.below(names.size())]);
      props += "assert property (@(posedge clk) " + roots.back() + " |-> " + roots.back() + ");\n";
    }
    const auto set = sva::parse_sva(props);
    std::vector<const sva::Property*> ptrs;
    for (const auto& p : set.properties) ptrs.push_back(&p);
    std::set<std::string> seen;
    std::vector<std::string> stack = roots;
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      if (fanin.count(n)) stack.insert(stack.end(), fanin[n].begin(), fanin[n].end());
    }
    seen.insert("clk");
    const double want = double(seen.size()) / double(graph.nodes.size());
    const double got = eval::coi_coverage(ptrs, graph);
    if (std::abs(got - want) > 1e-12) {
      o.fail("dag " + std::to_string(iter) + ": " + util::format_fixed(got) + " vs " + util::format_fixed(want));
    }
  }
  if (o.ok) o.note << "10 random DAGs of at most 50 signals";
  return o;
}

// Short and unresolved designs are rejected with the right reason.
Outcome ingest_gates() {
  Outcome o;
  const auto ws = scratch("ingest");
  const auto a = campaign::ingest(kFixtures / "short150", "short150", ws);
  const auto b = campaign::ingest(kFixtures / "unresolved", "unresolved_top", ws);
  if (a.entry || a.reason.rfind("loc<200", 0) != 0) o.fail("short design: " + a.reason);
  if (b.entry || b.reason.rfind("elaboration failure", 0) != 0) o.fail("unresolved design: " + b.reason);
  if (!campaign::load_index(ws).empty()) o.fail("rejected designs were indexed");
  fs::remove_all(ws);
  if (o.ok) o.note << "\"" << a.reason << "\", \"" << b.reason << "\"";
  return o;
}

// Two campaigns from the same config and seed give identical artifacts.
Outcome reproducibility() {
  Outcome o;
  std::vector<std::string> trees, reports;
  for (int pass = 0; pass < 2; ++pass) {
    const auto ws = scratch("repro" + std::to_string(pass));
    auto cfg = default_config();
    cfg.workers = pass == 0 ? 1 : 8;
    std::string tree, rep;
    for (const auto& d : kDesigns) {
      const auto ing = campaign::ingest(kCorpus / d, "", ws);
      campaign::run_mutate(*ing.entry, cfg);
      tree += tree_text(ing.entry->root);
      for (auto mode : {eval::Mode::Average, eval::Mode::Union}) {
        const auto r = campaign::run_prevention_eval(*ing.entry, kCorpus / d / "assertions", mode, cfg);
        rep += eval::format_report(r) + eval::format_table(r);
      }
    }
    trees.push_back(tree);
    reports.push_back(rep);
    fs::remove_all(ws);
  }
  if (trees[0] != trees[1]) o.fail("manifests or variants differ");
  if (reports[0] != reports[1]) o.fail("reports differ");
  if (o.ok) o.note << "4 designs, " << trees[0].size() + reports[0].size() << " bytes compared";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"corpus-generation", corpus_generation}, {"pool-selection", pool_and_selection},
      {"single-site-diff", single_site_diff},   {"involutions", involutions},
      {"equivalence-oracle", equivalence_oracle}, {"simulator", simulator_checks},
      {"kill-table", kill_tables},              {"union-monotonic", union_monotonic},
      {"coi-reachability", coi_reachability},   {"ingest-gates", ingest_gates},
      {"reproducibility", reproducibility}};
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-20s %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.note.str().c_str(), s);
    std::fflush(stdout);
    failed += o.ok ? 0 : 1;
  }
  fs::remove_all(workspace().root);
  std::printf("%zu criteria, %d failed\n", checks.size(), failed);
  return failed == 0 ? 0 : 1;
}
