#include "rtlmut/eval/eval.hpp"

#include <algorithm>
#include <sstream>

#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/parallel.hpp"

namespace rtlmut::eval {

namespace fs = std::filesystem;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Validated:
      return "validated";
    case Verdict::Cex:
      return "cex";
    case Verdict::Undetermined:
      return "undetermined";
  }
  return "?";
}

const char* mode_name(Mode m) { return m == Mode::Average ? "average" : "union"; }

Mode mode_from_name(const std::string& name) {
  if (name == "average") return Mode::Average;
  if (name == "union") return Mode::Union;
  throw EvalError("unknown aggregation mode '" + name + "'");
}

std::size_t Run::statements() const {
  std::size_t n = 0;
  for (const auto& s : sets) n += s.statements;
  return n;
}

std::size_t Run::parsed() const {
  std::size_t n = 0;
  for (const auto& s : sets) n += s.properties.size();
  return n;
}

Run load_run(const fs::path& dir, const std::string& label) {
  Run run;
  run.label = label;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".sva" || ext == ".sv")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) run.sets.push_back(sva::parse_sva(util::read_file(f), f.filename().string(), label));
  return run;
}

std::vector<Run> load_runs(const fs::path& root, std::size_t expected) {
  if (!fs::is_directory(root)) throw MissingAssertionRuns("assertion directory " + root.string() + " not found");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty() && fs::is_empty(root)) {
    std::vector<Run> empty(expected);
    for (std::size_t k = 0; k < expected; ++k) empty[k].label = "run" + std::to_string(k + 1);
    return empty;
  }
  if (dirs.size() != expected) {
    throw RunCountMismatch("expected " + std::to_string(expected) + " assertion runs under " + root.string() +
                           ", found " + std::to_string(dirs.size()));
  }
  std::vector<Run> runs;
  for (const auto& d : dirs) runs.push_back(load_run(d, d.filename().string()));
  return runs;
}

std::vector<sim::Stimulus> validation_suite(const sim::Model& golden, const EvalConfig& cfg) {
  std::vector<sim::Stimulus> out;
  for (std::uint32_t k = 0; k < cfg.vectors; ++k) {
    out.push_back(sim::Stimulus::random(util::mix_keys(cfg.seed, k, 0x5eed), cfg.reset_cycles,
                                        cfg.reset_cycles + cfg.sim_cycles));
  }
  if (!golden.has_sequential() && golden.data_input_bits() <= cfg.exhaustive_bits) {
    out.push_back(sim::Stimulus::exhaustive(golden, 0));
  }
  return out;
}

std::vector<sim::Stimulus> evaluation_suite(const sim::Model& golden, const EvalConfig& cfg,
                                            const std::vector<sim::Witness>& witnesses) {
  auto out = validation_suite(golden, cfg);
  std::set<std::string> seen;
  for (const auto& s : out) seen.insert(s.describe());
  for (const auto& w : witnesses) {
    if (seen.insert(w.stimulus).second) out.push_back(sim::Stimulus::parse(w.stimulus));
  }
  return out;
}

std::vector<PropertyVerdict> validate_on_golden(const std::vector<PropertyRef>& props,
                                                const std::vector<sim::Trace>& golden_traces, unsigned workers) {
  std::vector<PropertyVerdict> out(props.size());
  util::parallel_for(props.size(), workers, [&](std::size_t i) {
    auto& v = out[i];
    v.key = props[i].key();
    bool pass = false;
    std::string note;
    for (const auto& t : golden_traces) {
      try {
        const auto r = sva::check_on_trace(*props[i].prop, t);
        if (r.kind == sva::MonitorResult::Kind::Violation) {
          v.verdict = Verdict::Cex;
          v.detail = "violation at cycle " + std::to_string(r.cycle) + " under " + t.stimulus;
          return;
        }
        pass = pass || r.kind == sva::MonitorResult::Kind::Pass;
      } catch (const std::exception& e) {
        if (note.empty()) note = e.what();
      }
    }
    v.verdict = pass ? Verdict::Validated : Verdict::Undetermined;
    v.detail = pass ? "" : (note.empty() ? "vacuous on every stimulus" : note);
  });
  return out;
}

std::set<std::string> property_cone(const std::vector<const sva::Property*>& props,
                                    const elab::ConnectivityGraph& graph) {
  std::vector<std::string> roots;
  for (const auto* p : props) {
    for (const auto& s : p->signals()) {
      if (graph.has_node(s)) roots.push_back(s);
    }
  }
  if (roots.empty()) return {};
  return graph.backward_reachable(roots);
}

double coi_coverage(const std::vector<const sva::Property*>& props, const elab::ConnectivityGraph& graph) {
  if (graph.nodes.empty()) return 0.0;
  return static_cast<double>(property_cone(props, graph).size()) / static_cast<double>(graph.nodes.size());
}

std::vector<VariantOutcome> evaluate_variants(const elab::Design& golden, const std::vector<Variant>& variants,
                                              const std::vector<PropertyRef>& props,
                                              const std::vector<sim::Stimulus>& suite, unsigned workers) {
  std::vector<VariantOutcome> out(variants.size());
  util::parallel_for(variants.size(), workers, [&](std::size_t i) {
    auto& o = out[i];
    o.id = variants[i].id;
    if (!fs::is_directory(variants[i].dir)) {
      o.error = true;
      o.detail = "missing variant files";
      return;
    }
    std::vector<sim::Trace> traces;
    try {
      const auto design = elab::elaborate(elab::load_design_files(variants[i].dir), golden.top, o.id);
      const auto model = sim::Model::compile(design);
      for (const auto& s : suite) traces.push_back(sim::simulate(model, s));
    } catch (const std::exception& e) {
      o.error = true;
      o.detail = e.what();
      return;
    }
    for (const auto& p : props) {
      for (const auto& t : traces) {
        try {
          if (sva::check_on_trace(*p.prop, t).kind == sva::MonitorResult::Kind::Violation) {
            o.violated.insert(p.key());
            break;
          }
        } catch (const std::exception&) {
          // Same schema as golden, where the property already checked cleanly.
        }
      }
    }
  });
  return out;
}

double RunMetrics::syntax_rate() const {
  return statements == 0 ? 0.0 : static_cast<double>(parsed) / static_cast<double>(statements);
}

double RunMetrics::coi() const {
  return nodes == 0 ? 0.0 : static_cast<double>(cone.size()) / static_cast<double>(nodes);
}

double RunMetrics::kill_ratio() const {
  return variants == 0 ? 0.0 : static_cast<double>(killed.size()) / static_cast<double>(variants);
}

Aggregate aggregate(const std::vector<RunMetrics>& runs, Mode mode, std::size_t expected_runs) {
  if (runs.size() != expected_runs) {
    throw RunCountMismatch("expected " + std::to_string(expected_runs) + " runs, got " + std::to_string(runs.size()));
  }
  Aggregate a;
  a.mode = mode;
  a.runs = runs.size();
  std::size_t statements = 0;
  std::size_t parsed = 0;
  std::set<std::string> cone;
  std::size_t nodes = 0;
  std::size_t variants = 0;
  double coi_sum = 0;
  double kill_sum = 0;
  for (const auto& r : runs) {
    statements += r.statements;
    parsed += r.parsed;
    a.validated += r.validated;
    cone.insert(r.cone.begin(), r.cone.end());
    a.killed.insert(r.killed.begin(), r.killed.end());
    nodes = std::max(nodes, r.nodes);
    variants = std::max(variants, r.variants);
    coi_sum += r.coi();
    kill_sum += r.kill_ratio();
  }
  a.total = parsed;
  a.syntax_rate = statements == 0 ? 0.0 : static_cast<double>(parsed) / static_cast<double>(statements);
  if (runs.empty()) return a;
  if (mode == Mode::Average) {
    a.coi = coi_sum / static_cast<double>(runs.size());
    a.kill_ratio = kill_sum / static_cast<double>(runs.size());
  } else {
    a.coi = nodes == 0 ? 0.0 : static_cast<double>(cone.size()) / static_cast<double>(nodes);
    a.kill_ratio = variants == 0 ? 0.0 : static_cast<double>(a.killed.size()) / static_cast<double>(variants);
  }
  return a;
}

double HuntingResult::kill_ratio() const {
  return bugs.empty() ? 0.0 : static_cast<double>(attributed) / static_cast<double>(bugs.size());
}

HuntingResult attribute(const std::string& merged_id, const VariantOutcome& merged,
                        const std::vector<std::pair<std::string, const VariantOutcome*>>& singles,
                        const std::set<std::string>& scope) {
  auto in_scope = [&](const std::set<std::string>& violated) {
    std::set<std::string> out;
    for (const auto& k : violated) {
      if (scope.count(k)) out.insert(k);
    }
    return out;
  };
  HuntingResult h;
  h.merged_id = merged_id;
  const auto merged_hits = in_scope(merged.violated);
  h.merged_violated = !merged_hits.empty();
  std::set<std::string> corroborated;
  for (const auto& [id, single] : singles) {
    BugAttribution b;
    b.mutant_id = id;
    if (single) {
      const auto hits = in_scope(single->violated);
      b.single_violated = !hits.empty();
      corroborated.insert(hits.begin(), hits.end());
    }
    b.attributed = h.merged_violated && b.single_violated;
    h.attributed += b.attributed ? 1 : 0;
    h.bugs.push_back(b);
  }
  for (const auto& k : merged_hits) {
    if (!corroborated.count(k)) ++h.unattributed;
  }
  return h;
}

namespace {

std::string fixed(double v) { return util::format_fixed(v, 4); }

util::KvBlock run_block(const RunMetrics& r) {
  util::KvBlock b;
  b.add("statements", std::to_string(r.statements));
  b.add("parsed", std::to_string(r.parsed));
  b.add("syntax_rate", fixed(r.syntax_rate()));
  b.add("validated", std::to_string(r.validated));
  b.add("cex", std::to_string(r.cex));
  b.add("undetermined", std::to_string(r.undetermined));
  b.add("coi_signals", std::to_string(r.cone.size()));
  b.add("coi_nodes", std::to_string(r.nodes));
  b.add("coi_coverage", fixed(r.coi()));
  std::string killed;
  for (const auto& k : r.killed) killed += (killed.empty() ? "" : ",") + k;
  b.add("killed", killed);
  b.add("variants", std::to_string(r.variants));
  b.add("kill_ratio", fixed(r.kill_ratio()));
  return b;
}

util::KvBlock hunting_block(const HuntingResult& h) {
  util::KvBlock b;
  b.add("merged", h.merged_id);
  b.add("merged_violated", h.merged_violated ? "yes" : "no");
  for (const auto& bug : h.bugs) {
    b.add("bug", bug.mutant_id + " single=" + (bug.single_violated ? "violated" : "clean") +
                     " attributed=" + (bug.attributed ? "yes" : "no"));
  }
  b.add("attributed", std::to_string(h.attributed));
  b.add("unattributed_kills", std::to_string(h.unattributed));
  b.add("kill_ratio", fixed(h.kill_ratio()));
  return b;
}

}  // namespace

std::string format_report(const EvaluationReport& r) {
  std::vector<std::pair<std::string, util::KvBlock>> blocks;
  util::KvBlock h;
  h.add("format", "rtlmut-report 1");
  h.add("design_id", r.design_id);
  h.add("mode", mode_name(r.mode));
  h.add("runs", std::to_string(r.runs.size()));
  h.add("validation", "validated (sim): simulation over the evaluation stimulus suite, not a proof");
  h.add("vacuity", "properties vacuous on every stimulus are undetermined and earn no credit");
  h.add("coi_denominator", "named signals of the elaborated hierarchy, clocks and resets included");
  h.add("proof_coverage", "requires external formal engine");
  h.add("formal_coverage", "requires external formal engine");
  for (const auto& [k, v] : r.config.entries) h.add("config." + k, v);
  blocks.emplace_back("report", h);

  util::KvBlock o;
  o.add("syntax_rate", fixed(r.overall.syntax_rate));
  o.add("validated", std::to_string(r.overall.validated));
  o.add("total", std::to_string(r.overall.total));
  o.add("coi_coverage", fixed(r.overall.coi));
  o.add("kill_ratio", fixed(r.overall.kill_ratio));
  if (!r.hunting_runs.empty() || r.hunting_union) o.add("hunting_kill_ratio", fixed(r.hunting_ratio));
  blocks.emplace_back("overall", o);

  for (const auto& run : r.runs) blocks.emplace_back("run " + run.label, run_block(run));

  util::KvBlock pv;
  for (const auto& v : r.verdicts) {
    pv.add(v.key, std::string(verdict_name(v.verdict)) + (v.detail.empty() ? "" : " " + v.detail));
  }
  blocks.emplace_back("properties", pv);

  util::KvBlock kt;
  for (const auto& row : r.kill_table) {
    std::string by;
    for (const auto& l : row.killed_by) by += (by.empty() ? "" : ",") + l;
    std::string line = row.error ? "error " + row.detail : (by.empty() ? "survived" : "killed " + by);
    if (!row.error) line += " violated=" + std::to_string(row.violated);
    kt.add(row.variant, line);
  }
  blocks.emplace_back("kills", kt);

  for (std::size_t i = 0; i < r.hunting_runs.size(); ++i) {
    blocks.emplace_back("hunting " + r.runs[i].label, hunting_block(r.hunting_runs[i]));
  }
  if (r.hunting_union) blocks.emplace_back("hunting union", hunting_block(*r.hunting_union));
  return util::format_kv(blocks);
}

std::string format_table(const EvaluationReport& r) {
  std::ostringstream os;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                 const std::string& e) {
    os << std::left;
    os.width(12);
    os << a;
    os.width(10);
    os << b;
    os.width(18);
    os << c;
    os.width(8);
    os << d;
    os << e << "\n";
  };
  auto pct = [](double v) { return util::format_fixed(100.0 * v, 1); };
  os << "design " << r.design_id << ", mode " << mode_name(r.mode) << "\n";
  row("run", "Syntax %", "Validated/Total", "COI", "Kill Ratio");
  for (const auto& run : r.runs) {
    row(run.label, pct(run.syntax_rate()), std::to_string(run.validated) + "/" + std::to_string(run.parsed),
        fixed(run.coi()), fixed(run.kill_ratio()));
  }
  row(mode_name(r.mode), pct(r.overall.syntax_rate),
      std::to_string(r.overall.validated) + "/" + std::to_string(r.overall.total), fixed(r.overall.coi),
      fixed(r.overall.kill_ratio));
  if (!r.hunting_runs.empty() || r.hunting_union) os << "hunting kill ratio " << fixed(r.hunting_ratio) << "\n";
  os << "validated (sim) counts come from simulation; proof and formal coverage require external formal engine\n";
  return os.str();
}

}  // namespace rtlmut::eval
