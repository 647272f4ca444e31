#include "rtlmut/campaign/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rtlmut/hdl/source.hpp"
#include "rtlmut/mut/operators.hpp"
#include "rtlmut/sim/model.hpp"
#include "rtlmut/util/hash.hpp"

namespace rtlmut::campaign {

namespace fs = std::filesystem;

namespace {

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config " + key + ": expected an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config " + key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

void CampaignConfig::set(const std::string& key, const std::string& value) {
  if (key == "design") {
    design_dir = value;
  } else if (key == "top") {
    top = value;
  } else if (key == "spec_signals") {
    spec_signals = value;
  } else if (key == "budget") {
    budget = to_u64(key, value);
  } else if (key == "overgen_factor" || key == "overgen") {
    try {
      overgen = std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError("config " + key + ": expected a number, got '" + value + "'");
    }
  } else if (key == "seed") {
    seed = to_u64(key, value);
  } else if (key == "vectors") {
    vectors = static_cast<std::uint32_t>(to_u64(key, value));
  } else if (key == "exhaustive_bits") {
    exhaustive_bits = static_cast<std::uint32_t>(to_u64(key, value));
  } else if (key == "reset_cycles") {
    reset_cycles = static_cast<std::uint32_t>(to_u64(key, value));
  } else if (key == "sim_cycles") {
    sim_cycles = to_u64(key, value);
  } else if (key == "equiv_cycles") {
    equiv_cycles = to_u64(key, value);
  } else if (key == "operators") {
    operators = value;
  } else if (key == "runs") {
    runs = to_u64(key, value);
  } else if (key == "strict") {
    strict = to_bool(key, value);
  } else if (key == "lenient") {
    lenient = to_bool(key, value);
  } else if (key == "retain_unknown") {
    retain_unknown = to_bool(key, value);
  } else if (key == "workers") {
    workers = static_cast<unsigned>(to_u64(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void CampaignConfig::load(const fs::path& file) {
  for (const auto& [name, block] : util::parse_kv(util::read_file(file))) {
    if (!name.empty()) throw ConfigError("config file " + file.string() + ": sections are not allowed");
    for (const auto& [k, v] : block.entries) set(k, v);
  }
}

void CampaignConfig::validate() const {
  if (budget < 1) throw ConfigError("budget must be at least 1");
  if (!(overgen >= 1.0)) throw ConfigError("overgen_factor must be at least 1");
  if (vectors < 1 || sim_cycles < 1 || equiv_cycles < 1 || runs < 1 || workers < 1) {
    throw ConfigError("vectors, sim_cycles, equiv_cycles, runs and workers must be positive");
  }
  if (exhaustive_bits > 24) throw ConfigError("exhaustive_bits must be at most 24");
  pipeline();  // rejects unknown operator names
}

util::KvBlock CampaignConfig::snapshot() const {
  util::KvBlock b;
  b.add("budget", std::to_string(budget));
  b.add("overgen_factor", util::format_fixed(overgen, 3));
  b.add("seed", std::to_string(seed));
  b.add("vectors", std::to_string(vectors));
  b.add("exhaustive_bits", std::to_string(exhaustive_bits));
  b.add("reset_cycles", std::to_string(reset_cycles));
  b.add("sim_cycles", std::to_string(sim_cycles));
  b.add("equiv_cycles", std::to_string(equiv_cycles));
  b.add("operators", operators);
  b.add("runs", std::to_string(runs));
  b.add("strict", strict ? "true" : "false");
  b.add("lenient", lenient ? "true" : "false");
  b.add("retain_unknown", retain_unknown ? "true" : "false");
  return b;
}

pipeline::PipelineConfig CampaignConfig::pipeline() const {
  pipeline::PipelineConfig p;
  p.budget = budget;
  p.overgen = overgen;
  p.seed = seed;
  p.equiv.seed = seed;
  p.equiv.reset_cycles = reset_cycles;
  p.equiv.random_cycles = equiv_cycles;
  p.equiv.exhaustive_bits = exhaustive_bits;
  p.retain_unknown = retain_unknown;
  p.workers = workers;
  if (operators != "all") {
    p.mutation.operators.clear();
    for (const auto& name : util::split(operators, ',')) {
      const auto t = util::trim(name);
      if (t.empty()) continue;
      auto op = mut::operator_from_name(t);
      if (!op) throw ConfigError("unknown operator '" + t + "'");
      p.mutation.operators.insert(*op);
    }
  }
  return p;
}

eval::EvalConfig CampaignConfig::evaluation() const {
  eval::EvalConfig e;
  e.seed = seed;
  e.vectors = vectors;
  e.reset_cycles = reset_cycles;
  e.sim_cycles = sim_cycles;
  e.exhaustive_bits = exhaustive_bits;
  e.runs = runs;
  e.workers = workers;
  e.lenient = lenient;
  return e;
}

fs::path rtl_dir(const fs::path& design_dir) {
  return fs::is_directory(design_dir / "rtl") ? design_dir / "rtl" : design_dir;
}

namespace {

struct Loaded {
  std::optional<elab::Design> design;
  std::string reason;
};

Loaded load_checked(const fs::path& design_dir, const std::string& top, const std::string& id, std::size_t min_loc) {
  Loaded out;
  if (!fs::is_directory(design_dir)) {
    out.reason = "design directory not found";
    return out;
  }
  std::vector<elab::DesignFile> files;
  try {
    files = elab::load_design_files(rtl_dir(design_dir));
  } catch (const std::exception& e) {
    out.reason = std::string("parse failure: ") + e.what();
    return out;
  }
  if (files.empty()) {
    out.reason = "no Verilog sources";
    return out;
  }
  try {
    out.design = elab::elaborate(std::move(files), top, id);
  } catch (const std::exception& e) {
    out.reason = std::string("elaboration failure: ") + e.what();
    return out;
  }
  if (out.design->loc < min_loc) {
    out.reason = "loc<" + std::to_string(min_loc) + " (" + std::to_string(out.design->loc) + " lines)";
    out.design.reset();
  }
  return out;
}

std::map<std::string, std::string> read_design_cfg(const fs::path& design_dir) {
  std::map<std::string, std::string> out;
  const auto f = design_dir / "design.cfg";
  if (!fs::exists(f)) return out;
  for (const auto& [name, block] : util::parse_kv(util::read_file(f))) {
    for (const auto& [k, v] : block.entries) out[k] = v;
  }
  return out;
}

void write_index(const fs::path& workspace, const std::vector<BenchmarkEntry>& entries) {
  std::vector<std::pair<std::string, util::KvBlock>> blocks;
  for (const auto& e : entries) {
    util::KvBlock b;
    b.add("group", e.group);
    b.add("top", e.top);
    b.add("loc", std::to_string(e.loc));
    blocks.emplace_back("entry " + e.id, b);
  }
  util::write_file(workspace / "index.txt", util::format_kv(blocks));
}

BenchmarkEntry entry_from(const fs::path& workspace, const std::string& id, const util::KvBlock& b) {
  BenchmarkEntry e;
  e.id = id;
  e.group = b.require("group");
  e.top = b.require("top");
  e.loc = std::stoul(b.require("loc"));
  e.root = workspace / id;
  return e;
}

}  // namespace

std::string check_design(const fs::path& design_dir, const std::string& top, std::size_t min_loc) {
  return load_checked(design_dir, top, design_dir.filename().string(), min_loc).reason;
}

IngestResult prepare_entry(const fs::path& design_dir, std::string top, const fs::path& root, std::string group,
                           const fs::path& spec_signals) {
  IngestResult res;
  const auto meta = read_design_cfg(design_dir);
  if (top.empty() && meta.count("top")) top = meta.at("top");
  if (group.empty()) group = meta.count("group") ? meta.at("group") : "default";
  const std::string id = fs::absolute(root).lexically_normal().filename().string();
  auto loaded = load_checked(design_dir, top, id, 200);
  if (!loaded.design) {
    res.reason = loaded.reason;
    return res;
  }
  const auto& d = *loaded.design;
  BenchmarkEntry e;
  e.id = id;
  e.group = group;
  e.top = d.top;
  e.loc = d.loc;
  e.root = root;
  fs::remove_all(e.golden_dir());
  for (const auto& f : d.files) util::write_file(e.golden_dir() / f.path, f.source.text());
  if (fs::exists(design_dir / "spec.txt")) util::write_file(e.spec(), util::read_file(design_dir / "spec.txt"));
  const auto signals = spec_signals.empty() ? design_dir / "spec_signals.txt" : spec_signals;
  if (fs::exists(signals)) util::write_file(e.spec_signals(), util::read_file(signals));
  util::KvBlock b;
  b.add("design_id", e.id);
  b.add("group", e.group);
  b.add("top", e.top);
  b.add("loc", std::to_string(e.loc));
  util::write_file(e.root / "entry.txt", util::format_kv({{"entry", b}}));
  res.entry = e;
  return res;
}

IngestResult ingest(const fs::path& design_dir, std::string top, const fs::path& workspace, std::string id,
                    std::string group) {
  if (id.empty()) id = fs::absolute(design_dir).lexically_normal().filename().string();
  auto res = prepare_entry(design_dir, std::move(top), workspace / id, std::move(group));
  if (!res.entry) return res;
  auto entries = fs::exists(workspace / "index.txt") ? load_index(workspace) : std::vector<BenchmarkEntry>{};
  entries.erase(std::remove_if(entries.begin(), entries.end(), [&](const BenchmarkEntry& x) { return x.id == id; }),
                entries.end());
  entries.push_back(*res.entry);
  std::sort(entries.begin(), entries.end(),
            [](const BenchmarkEntry& a, const BenchmarkEntry& b) { return a.id < b.id; });
  write_index(workspace, entries);
  return res;
}

BenchmarkEntry load_entry(const fs::path& root) {
  return load_entry(root.parent_path(), root.filename().string());
}

BenchmarkEntry load_entry(const fs::path& workspace, const std::string& id) {
  const auto f = workspace / id / "entry.txt";
  if (!fs::exists(f)) throw Rejection("design '" + id + "' is not in workspace " + workspace.string());
  for (const auto& [name, block] : util::parse_kv(util::read_file(f))) {
    if (name == "entry") return entry_from(workspace, id, block);
  }
  throw Rejection("malformed entry file " + f.string());
}

std::vector<BenchmarkEntry> load_index(const fs::path& workspace) {
  std::vector<BenchmarkEntry> out;
  const auto f = workspace / "index.txt";
  if (!fs::exists(f)) return out;
  for (const auto& [name, block] : util::parse_kv(util::read_file(f))) {
    if (name.rfind("entry ", 0) == 0) out.push_back(entry_from(workspace, name.substr(6), block));
  }
  return out;
}

elab::Design load_golden(const BenchmarkEntry& entry) {
  return elab::elaborate(elab::load_design_files(entry.golden_dir()), entry.top, entry.id);
}

TargetSet resolve_entry_targets(const elab::Design& golden, const BenchmarkEntry& entry) {
  if (!fs::exists(entry.spec_signals())) throw Rejection("no spec_signals.txt for " + entry.id);
  TargetSet t;
  t.graph = elab::build_connectivity(golden);
  t.clock_reset = elab::classify_clock_reset(golden, t.graph);
  t.targets = elab::resolve_targets(golden, t.graph, t.clock_reset, util::read_list(entry.spec_signals()));
  return t;
}

util::KvBlock provenance(const BenchmarkEntry& entry, const CampaignConfig& cfg) {
  auto snap = cfg.snapshot();
  snap.entries.insert(snap.entries.begin(), {"top", entry.top});
  snap.entries.insert(snap.entries.begin(), {"design_id", entry.id});
  return snap;
}

pipeline::CorpusResult run_mutate(const BenchmarkEntry& entry, const CampaignConfig& cfg) {
  const auto golden = load_golden(entry);
  const auto t = resolve_entry_targets(golden, entry);
  auto result = pipeline::generate_corpus(golden, t.graph, t.targets, cfg.pipeline());
  pipeline::write_corpus(result, golden, provenance(entry, cfg), entry.root);
  if (cfg.strict) {
    if (result.retained.size() < cfg.budget) {
      throw Rejection("strict: retained " + std::to_string(result.retained.size()) + " of " +
                      std::to_string(cfg.budget));
    }
    if (!result.merged) throw Rejection("strict: no five-bug variant");
  }
  return result;
}

namespace {

pipeline::Manifest read_manifest(const BenchmarkEntry& entry) {
  if (!fs::exists(entry.manifest())) throw MissingManifest("no manifest for " + entry.id + "; run mutate first");
  return pipeline::parse_manifest(util::read_file(entry.manifest()));
}

}  // namespace

pipeline::MergedVariant run_merge(const BenchmarkEntry& entry, std::vector<std::string> ids,
                                  const CampaignConfig& cfg, const fs::path& out_dir) {
  const auto golden = load_golden(entry);
  const auto manifest = read_manifest(entry);
  if (ids.empty()) {
    if (!manifest.merged) throw eval::MissingMergedVariant("manifest lists no five-bug variant; pass --ids");
    ids = manifest.merged->constituents;
  }
  std::vector<const pipeline::MutantRecord*> parts;
  for (const auto& id : ids) {
    const auto* r = manifest.find(id);
    if (!r) throw Rejection("mutant " + id + " is not in the manifest");
    parts.push_back(r);
  }
  auto mv = pipeline::compose_multibug(golden, parts, cfg.pipeline().mutation);
  pipeline::write_variant(golden, mv.texts, out_dir.empty() ? entry.mutants_dir() / ("merged_" + mv.id) : out_dir);
  return mv;
}

namespace {

eval::EvaluationReport evaluate(const BenchmarkEntry& entry, const fs::path& assertions, eval::Mode mode,
                                const CampaignConfig& cfg, bool require_merged) {
  const auto ecfg = cfg.evaluation();
  const auto golden = load_golden(entry);
  const auto manifest = read_manifest(entry);
  if (require_merged && !manifest.merged) {
    throw eval::MissingMergedVariant("manifest of " + entry.id + " has no five-bug variant");
  }
  auto runs = eval::load_runs(assertions, ecfg.runs);
  const auto model = sim::Model::compile(golden);
  const auto graph = elab::build_connectivity(golden);

  const auto retained = manifest.retained();
  std::vector<sim::Witness> witnesses;
  for (const auto* r : retained) {
    if (r->witness) witnesses.push_back(*r->witness);
  }
  const auto suite = eval::evaluation_suite(model, ecfg, witnesses);
  const auto traces = sim::simulate_all(model, suite, ecfg.workers);

  std::vector<eval::PropertyRef> props;
  for (auto& run : runs) {
    for (auto& set : run.sets) {
      sva::bind_signals(set, traces.front().signals);
      for (const auto& p : set.properties) props.push_back({run.label, &p});
    }
  }
  const auto verdicts = eval::validate_on_golden(props, traces, ecfg.workers);

  std::vector<eval::PropertyRef> validated;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (verdicts[i].verdict == eval::Verdict::Validated) validated.push_back(props[i]);
  }

  std::vector<eval::Variant> variants;
  for (const auto* r : retained) variants.push_back({r->mutant_id, entry.mutants_dir() / r->mutant_id});
  if (manifest.merged) {
    variants.push_back({"merged_" + manifest.merged->id, entry.mutants_dir() / ("merged_" + manifest.merged->id)});
  }
  const auto outcomes = eval::evaluate_variants(golden, variants, validated, suite, ecfg.workers);
  const std::size_t singles = retained.size();

  eval::EvaluationReport rep;
  rep.design_id = entry.id;
  rep.mode = mode;
  rep.config = provenance(entry, cfg);
  rep.verdicts = verdicts;

  std::size_t errors = 0;
  for (std::size_t v = 0; v < singles; ++v) errors += outcomes[v].error ? 1 : 0;
  const std::size_t denominator = ecfg.lenient ? singles - errors : singles;

  for (const auto& run : runs) {
    eval::RunMetrics m;
    m.label = run.label;
    m.statements = run.statements();
    m.parsed = run.parsed();
    std::vector<const sva::Property*> good;
    std::set<std::string> keys;
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i].run != run.label) continue;
      switch (verdicts[i].verdict) {
        case eval::Verdict::Validated:
          ++m.validated;
          good.push_back(props[i].prop);
          keys.insert(props[i].key());
          break;
        case eval::Verdict::Cex:
          ++m.cex;
          break;
        case eval::Verdict::Undetermined:
          ++m.undetermined;
          break;
      }
    }
    m.cone = eval::property_cone(good, graph);
    m.nodes = graph.nodes.size();
    for (std::size_t v = 0; v < singles; ++v) {
      for (const auto& k : outcomes[v].violated) {
        if (keys.count(k)) {
          m.killed.insert(outcomes[v].id);
          break;
        }
      }
    }
    m.variants = denominator;
    rep.runs.push_back(std::move(m));
  }
  rep.overall = eval::aggregate(rep.runs, mode, ecfg.runs);

  for (std::size_t v = 0; v < singles; ++v) {
    eval::KillRow row;
    row.variant = outcomes[v].id;
    row.error = outcomes[v].error;
    row.detail = outcomes[v].detail;
    row.violated = outcomes[v].violated.size();
    for (const auto& m : rep.runs) {
      if (m.killed.count(row.variant)) row.killed_by.push_back(m.label);
    }
    rep.kill_table.push_back(std::move(row));
  }

  if (manifest.merged) {
    const auto& merged_outcome = outcomes.back();
    std::vector<std::pair<std::string, const eval::VariantOutcome*>> parts;
    for (const auto& id : manifest.merged->constituents) {
      const eval::VariantOutcome* found = nullptr;
      for (std::size_t v = 0; v < singles; ++v) {
        if (outcomes[v].id == id) found = &outcomes[v];
      }
      parts.emplace_back(id, found);
    }
    std::set<std::string> all_keys;
    double sum = 0;
    for (const auto& run : runs) {
      std::set<std::string> keys;
      for (const auto& p : validated) {
        if (p.run == run.label) keys.insert(p.key());
      }
      all_keys.insert(keys.begin(), keys.end());
      rep.hunting_runs.push_back(eval::attribute(manifest.merged->id, merged_outcome, parts, keys));
      sum += rep.hunting_runs.back().kill_ratio();
    }
    rep.hunting_union = eval::attribute(manifest.merged->id, merged_outcome, parts, all_keys);
    rep.hunting_ratio = mode == eval::Mode::Average ? (runs.empty() ? 0.0 : sum / static_cast<double>(runs.size()))
                                                    : rep.hunting_union->kill_ratio();
  }
  return rep;
}

}  // namespace

eval::EvaluationReport run_prevention_eval(const BenchmarkEntry& entry, const fs::path& assertions, eval::Mode mode,
                                           const CampaignConfig& cfg) {
  return evaluate(entry, assertions, mode, cfg, false);
}

eval::EvaluationReport run_hunting_eval(const BenchmarkEntry& entry, const fs::path& assertions, eval::Mode mode,
                                        const CampaignConfig& cfg) {
  return evaluate(entry, assertions, mode, cfg, true);
}

Summary summarize(const fs::path& workspace, const std::string& mode) {
  Summary s;
  s.mode = mode;
  std::map<std::string, std::vector<const SummaryRow*>> by_group;
  for (const auto& e : load_index(workspace)) {
    const auto f = e.reports_dir() / (mode + ".txt");
    if (!fs::exists(f)) continue;
    SummaryRow row;
    row.id = e.id;
    row.group = e.group;
    row.loc = e.loc;
    for (const auto& [name, block] : util::parse_kv(util::read_file(f))) {
      if (name != "overall") continue;
      row.syntax = std::stod(block.require("syntax_rate"));
      row.validated = std::stoul(block.require("validated"));
      row.total = std::stoul(block.require("total"));
      row.coi = std::stod(block.require("coi_coverage"));
      row.kill = std::stod(block.require("kill_ratio"));
    }
    s.rows.push_back(row);
  }
  for (const auto& r : s.rows) by_group[r.group].push_back(&r);
  for (const auto& [g, rows] : by_group) {
    GroupRow gr;
    gr.group = g;
    gr.designs = rows.size();
    for (const auto* r : rows) {
      gr.avg_loc += static_cast<double>(r->loc);
      gr.syntax += r->syntax;
      gr.coi += r->coi;
      gr.kill += r->kill;
    }
    const auto n = static_cast<double>(rows.size());
    gr.avg_loc /= n;
    gr.syntax /= n;
    gr.coi /= n;
    gr.kill /= n;
    s.groups.push_back(gr);
  }
  return s;
}

std::string format_summary(const Summary& s) {
  std::vector<std::pair<std::string, util::KvBlock>> blocks;
  util::KvBlock h;
  h.add("format", "rtlmut-summary 1");
  h.add("mode", s.mode);
  h.add("designs", std::to_string(s.rows.size()));
  blocks.emplace_back("summary", h);
  for (const auto& r : s.rows) {
    util::KvBlock b;
    b.add("group", r.group);
    b.add("loc", std::to_string(r.loc));
    b.add("syntax_rate", util::format_fixed(r.syntax));
    b.add("validated", std::to_string(r.validated));
    b.add("total", std::to_string(r.total));
    b.add("coi_coverage", util::format_fixed(r.coi));
    b.add("kill_ratio", util::format_fixed(r.kill));
    blocks.emplace_back("design " + r.id, b);
  }
  for (const auto& g : s.groups) {
    util::KvBlock b;
    b.add("designs", std::to_string(g.designs));
    b.add("avg_loc", util::format_fixed(g.avg_loc, 1));
    b.add("syntax_rate", util::format_fixed(g.syntax));
    b.add("coi_coverage", util::format_fixed(g.coi));
    b.add("kill_ratio", util::format_fixed(g.kill));
    blocks.emplace_back("group " + g.group, b);
  }
  return util::format_kv(blocks);
}

}  // namespace rtlmut::campaign
