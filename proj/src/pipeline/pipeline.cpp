#include "rtlmut/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/parallel.hpp"

namespace rtlmut::pipeline {

using hdl::Node;
using hdl::NodePath;

const char* status_name(Status s) {
  switch (s) {
    case Status::Candidate:
      return "candidate";
    case Status::Duplicate:
      return "duplicate";
    case Status::Equivalent:
      return "equivalent";
    case Status::Invalid:
      return "invalid";
    case Status::Retained:
      return "retained";
  }
  return "?";
}

Status status_from_name(const std::string& name) {
  for (auto s : {Status::Candidate, Status::Duplicate, Status::Equivalent, Status::Invalid, Status::Retained}) {
    if (name == status_name(s)) return s;
  }
  throw util::FormatError("unknown status '" + name + "'");
}

std::string mutant_id(const std::string& design_id, const mut::Candidate& cand, const hdl::EditRecord& edit) {
  const std::string key = design_id + "\n" + cand.target.module + "." + cand.target.signal + "\n" + edit.operator_id +
                          "\n" + edit.variant + "\n" + edit.file + "\n" + hdl::path_to_string(cand.path) + "\n" +
                          hdl::path_to_string(edit.path) + "\n" + edit.before_fragment + "\n" + edit.after_fragment;
  return util::hex64(util::fnv1a(key));
}

void dedup(std::vector<MutantRecord>& records) {
  std::set<std::tuple<std::string, std::string, std::uint32_t, std::string>> seen;
  for (auto& r : records) {
    auto key = std::make_tuple(r.edit.operator_id, r.edit.file, r.edit.line, r.edit.after_fragment);
    if (r.status == Status::Duplicate) continue;
    if (!seen.insert(key).second && r.status == Status::Candidate && r.verdict.empty()) r.status = Status::Duplicate;
  }
}

std::vector<std::size_t> select_budget(const std::vector<MutantRecord>& records, std::size_t budget) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_signal;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto key = records[i].signal_key();
    auto [it, fresh] = by_signal.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(i);
  }
  std::vector<std::size_t> out;
  for (std::size_t pass = 0; out.size() < budget; ++pass) {
    bool took = false;
    for (const auto& key : order) {
      const auto& list = by_signal[key];
      if (pass < list.size() && out.size() < budget) {
        out.push_back(list[pass]);
        took = true;
      }
    }
    if (!took) break;
  }
  return out;
}

std::size_t pool_target(const PipelineConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.overgen * static_cast<double>(cfg.budget) - 1e-9));
}

std::string revalidate(const elab::Design& golden, const MutantRecord& rec) {
  Node reparsed;
  try {
    reparsed = hdl::parse_text(rec.edit.file, rec.mutated_text);
  } catch (const std::exception& e) {
    return std::string("reparse: ") + e.what();
  }
  try {
    elab::rebuild(golden, {{rec.edit.file, rec.mutated_text}});
  } catch (const std::exception& e) {
    return std::string("elaboration: ") + e.what();
  }
  const Node& g = *golden.files[golden.file_index(rec.edit.file)].ast;
  const auto sites = hdl::structural_diff({{rec.edit.file, &g}}, {{rec.edit.file, &reparsed}});
  if (sites.size() != 1) return "diff reports " + std::to_string(sites.size()) + " sites";
  if (!hdl::site_matches(rec.edit, sites[0], g, reparsed)) return "diff site does not match edit";
  return {};
}

namespace {

bool related(const NodePath& a, const NodePath& b) { return hdl::is_prefix(a, b) || hdl::is_prefix(b, a); }

NodePath list_parent(const MutantRecord& r) {
  NodePath p = r.edit.path;
  if (!p.empty()) p.pop_back();
  return p;
}

bool overlap(const MutantRecord& a, const MutantRecord& b) {
  if (a.edit.file != b.edit.file) return false;
  for (const auto* pa : {&a.cand.path, &a.edit.path}) {
    for (const auto* pb : {&b.cand.path, &b.edit.path}) {
      if (related(*pa, *pb)) return true;
    }
  }
  if (a.edit.kind != hdl::EditKind::Replace && hdl::is_prefix(list_parent(a), b.edit.path)) return true;
  if (b.edit.kind != hdl::EditKind::Replace && hdl::is_prefix(list_parent(b), a.edit.path)) return true;
  return false;
}

}  // namespace

MergedVariant compose_multibug(const elab::Design& golden, const std::vector<const MutantRecord*>& parts,
                               const mut::MutationConfig& cfg) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (overlap(*parts[i], *parts[j])) throw OverlappingEdits(parts[i]->mutant_id, parts[j]->mutant_id);
    }
  }
  std::vector<const MutantRecord*> order = parts;
  std::sort(order.begin(), order.end(), [](const MutantRecord* a, const MutantRecord* b) {
    return std::tie(a->edit.file, a->edit.path) > std::tie(b->edit.file, b->edit.path);
  });
  std::map<std::string, Node> trees;
  for (const auto* p : order) {
    auto it = trees.find(p->edit.file);
    if (it == trees.end()) it = trees.emplace(p->edit.file, *golden.files[golden.file_index(p->edit.file)].ast).first;
    auto r = mut::apply_in_place(golden, it->second, p->cand, cfg);
    auto* e = std::get_if<hdl::EditRecord>(&r);
    if (!e) throw MergeInvalid(p->mutant_id + ": " + std::get<mut::Infeasible>(r).reason);
    if (e->after_fragment != p->edit.after_fragment) throw MergeInvalid(p->mutant_id + ": edit changed when stacked");
  }
  MergedVariant mv;
  std::string key;
  for (const auto* p : parts) {
    mv.constituents.push_back(p->mutant_id);
    key += p->mutant_id + ",";
  }
  mv.id = util::hex64(util::fnv1a(golden.id + "\n" + key));
  std::map<std::string, Node> reparsed;
  for (auto& [file, tree] : trees) {
    Node clean = hdl::sanitize(tree);
    std::string text = hdl::emit(clean);
    try {
      reparsed.emplace(file, hdl::parse_text(file, text));
    } catch (const std::exception& e) {
      throw MergeInvalid(std::string("merged variant does not reparse: ") + e.what());
    }
    mv.texts.emplace(file, std::move(text));
  }
  elab::Design merged;
  try {
    merged = elab::rebuild(golden, mv.texts);
  } catch (const std::exception& e) {
    throw MergeInvalid(std::string("merged variant does not elaborate: ") + e.what());
  }
  std::vector<hdl::FileTree> g, m;
  for (const auto& [file, tree] : reparsed) {
    g.push_back({file, golden.files[golden.file_index(file)].ast.get()});
    m.push_back({file, &tree});
  }
  mv.diff_sites = hdl::structural_diff(g, m).size();
  if (mv.diff_sites != parts.size()) {
    throw MergeInvalid("merged variant diffs at " + std::to_string(mv.diff_sites) + " sites");
  }
  const auto gm = sim::Model::compile(golden);
  const auto mm = sim::Model::compile(merged);
  for (const auto* p : parts) {
    const bool diverges = p->witness && sim::replay_witness(gm, mm, *p->witness);
    (diverges ? mv.diverging : mv.masked).push_back(p->mutant_id);
  }
  return mv;
}

namespace {

struct Probed {
  std::optional<MutantRecord> rec;
};

bool poolable(const MutantRecord& r, bool retain_unknown) {
  return r.status == Status::Candidate &&
         (r.verdict == "distinguished" || (retain_unknown && r.verdict == "unknown"));
}

std::optional<MergedVariant> choose_quintuple(const elab::Design& golden, const std::vector<MutantRecord>& records,
                                              const std::vector<std::size_t>& retained, const PipelineConfig& cfg,
                                              std::vector<std::string>& log) {
  const std::size_t n = retained.size();
  if (n < 5) {
    log.push_back("five-bug variant skipped: only " + std::to_string(n) + " retained");
    return std::nullopt;
  }
  for (int distinct = 1; distinct >= 0; --distinct) {
    std::vector<std::size_t> idx{0, 1, 2, 3, 4};
    while (true) {
      std::vector<const MutantRecord*> parts;
      std::set<std::string> signals;
      bool ok = true;
      for (auto k : idx) {
        const auto& r = records[retained[k]];
        if (distinct && !signals.insert(r.signal_key()).second) ok = false;
        for (const auto* q : parts) {
          if (overlap(*q, r)) ok = false;
        }
        parts.push_back(&r);
      }
      if (ok) {
        try {
          auto mv = compose_multibug(golden, parts, cfg.mutation);
          log.push_back("five-bug variant " + mv.id + " from " + std::to_string(parts.size()) + " mutants, " +
                        std::to_string(mv.masked.size()) + " masked witnesses");
          return mv;
        } catch (const MergeInvalid& e) {
          log.push_back(std::string("five-bug attempt rejected: ") + e.what());
        }
      }
      // Next combination in lexicographic order.
      int k = 4;
      while (k >= 0 && idx[k] == n - 5 + static_cast<std::size_t>(k)) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < 5; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  log.push_back("five-bug variant skipped: no compatible quintuple");
  return std::nullopt;
}

}  // namespace

CorpusResult generate_corpus(const elab::Design& golden, const elab::ConnectivityGraph& graph,
                             const std::vector<elab::MutationTarget>& targets, const PipelineConfig& cfg) {
  CorpusResult res;
  res.design_id = golden.id;
  const std::size_t target = pool_target(cfg);
  const auto cands = mut::match_candidates(golden, graph, targets, cfg.mutation);
  res.candidates = cands.size();
  res.log.push_back("targets = " + std::to_string(targets.size()));
  res.log.push_back("candidates = " + std::to_string(cands.size()));
  res.log.push_back("budget = " + std::to_string(cfg.budget));
  res.log.push_back("pool_target = " + std::to_string(target));

  std::vector<std::vector<const mut::Candidate*>> per_target(targets.size());
  for (const auto& c : cands) {
    const auto t = std::find(targets.begin(), targets.end(), c.target) - targets.begin();
    per_target[static_cast<std::size_t>(t)].push_back(&c);
  }
  for (std::size_t t = 0; t < per_target.size(); ++t) {
    util::SplitMix rng(util::mix_keys(cfg.seed, util::fnv1a(targets[t].module + "." + targets[t].signal), 0));
    std::shuffle(per_target[t].begin(), per_target[t].end(), rng);
    // Round-robin over operators in order of first appearance.
    std::vector<mut::OperatorId> ops;
    std::map<mut::OperatorId, std::vector<const mut::Candidate*>> by_op;
    for (const auto* c : per_target[t]) {
      auto [it, fresh] = by_op.try_emplace(c->op);
      if (fresh) ops.push_back(c->op);
      it->second.push_back(c);
    }
    std::vector<const mut::Candidate*> mixed;
    for (std::size_t round = 0; mixed.size() < per_target[t].size(); ++round) {
      for (auto op : ops) {
        if (round < by_op[op].size()) mixed.push_back(by_op[op][round]);
      }
    }
    per_target[t] = std::move(mixed);
  }
  std::vector<const mut::Candidate*> order;
  for (std::size_t round = 0; order.size() < cands.size(); ++round) {
    for (const auto& list : per_target) {
      if (round < list.size()) order.push_back(list[round]);
    }
  }

  const auto golden_model = sim::Model::compile(golden);
  std::size_t batch_no = 0;
  for (std::size_t start = 0; start < order.size() && res.pool < target; start += cfg.batch, ++batch_no) {
    const std::size_t end = std::min(order.size(), start + cfg.batch);
    std::vector<Probed> probed(end - start);
    util::parallel_for(probed.size(), cfg.workers, [&](std::size_t i) {
      const auto& c = *order[start + i];
      auto r = mut::probe_apply(golden, c, cfg.mutation);
      auto* e = std::get_if<hdl::EditRecord>(&r);
      if (!e) return;
      auto applied = mut::apply_operator(golden, c, cfg.mutation, *e);
      MutantRecord rec;
      rec.mutant_id = mutant_id(golden.id, c, applied.edit);
      rec.cand = c;
      rec.edit = std::move(applied.edit);
      rec.mutated_text = std::move(applied.text);
      probed[i].rec = std::move(rec);
    });
    const std::size_t first_new = res.records.size();
    for (auto& p : probed) {
      ++res.probed;
      if (!p.rec) {
        ++res.infeasible;
        continue;
      }
      res.records.push_back(std::move(*p.rec));
    }
    dedup(res.records);

    util::parallel_for(res.records.size() - first_new, cfg.workers, [&](std::size_t i) {
      auto& rec = res.records[first_new + i];
      if (rec.status != Status::Candidate) return;
      try {
        const auto mutant = elab::rebuild(golden, {{rec.edit.file, rec.mutated_text}});
        const auto model = sim::Model::compile(mutant);
        auto eq = sim::check_equivalence(golden_model, model, cfg.equiv);
        rec.verdict = sim::equivalence_name(eq.verdict);
        rec.witness = eq.witness;
        if (eq.verdict == sim::Equivalence::Equivalent) rec.status = Status::Equivalent;
      } catch (const std::exception& e) {
        rec.status = Status::Invalid;
        rec.note = std::string("simulation: ") + e.what();
        return;
      }
      if (poolable(rec, cfg.retain_unknown)) {
        if (auto why = revalidate(golden, rec); !why.empty()) {
          rec.status = Status::Invalid;
          rec.note = why;
        }
      }
    });
    res.pool = static_cast<std::size_t>(std::count_if(res.records.begin(), res.records.end(),
                                                      [&](const MutantRecord& r) { return poolable(r, cfg.retain_unknown); }));
    res.log.push_back("batch " + std::to_string(batch_no) + ": probed " + std::to_string(end - start) +
                      ", pool " + std::to_string(res.pool) + "/" + std::to_string(target));
  }

  std::vector<std::size_t> pool_idx;
  std::vector<MutantRecord> pool_view;
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    if (poolable(res.records[i], cfg.retain_unknown)) {
      pool_idx.push_back(i);
      pool_view.push_back(res.records[i]);
    }
  }
  for (auto k : select_budget(pool_view, cfg.budget)) {
    res.records[pool_idx[k]].status = Status::Retained;
    res.retained.push_back(pool_idx[k]);
  }
  std::set<std::string> signals;
  for (auto i : res.retained) signals.insert(res.records[i].signal_key());
  res.log.push_back("pool = " + std::to_string(res.pool));
  res.log.push_back("retained = " + std::to_string(res.retained.size()) + " over " + std::to_string(signals.size()) +
                    " signals");
  if (res.retained.size() < cfg.budget) res.log.push_back("budget under-filled");
  res.merged = choose_quintuple(golden, res.records, res.retained, cfg, res.log);
  return res;
}

// Manifest ------------------------------------------------------------------

namespace {

util::KvBlock record_block(const MutantRecord& r) {
  util::KvBlock b;
  b.add("status", status_name(r.status));
  b.add("verdict", r.verdict);
  b.add("operator", r.edit.operator_id);
  b.add("variant", r.edit.variant);
  b.add("target_module", r.cand.target.module);
  b.add("target_signal", r.cand.target.signal);
  b.add("target_file", r.cand.target.file);
  b.add("file", r.edit.file);
  b.add("line", std::to_string(r.edit.line));
  b.add("anchor", hdl::path_to_string(r.cand.path));
  b.add("anchor_pos", std::to_string(r.cand.line) + ":" + std::to_string(r.cand.col));
  b.add("kind", std::string(hdl::edit_kind_name(r.edit.kind)));
  b.add("site", hdl::path_to_string(r.edit.path));
  b.add("before", r.edit.before_fragment);
  b.add("after", r.edit.after_fragment);
  b.add("witness", r.witness ? r.witness->to_string() : "");
  b.add("note", r.note);
  return b;
}

MutantRecord parse_record(const std::string& id, const util::KvBlock& b) {
  MutantRecord r;
  r.mutant_id = id;
  r.status = status_from_name(b.require("status"));
  r.verdict = b.require("verdict");
  auto op = mut::operator_from_name(b.require("operator"));
  if (!op) throw util::FormatError("unknown operator in record " + id);
  r.cand.op = *op;
  r.cand.variant = b.require("variant");
  r.cand.target = {b.require("target_module"), b.require("target_signal"), b.require("target_file")};
  r.cand.file = b.require("file");
  r.cand.path = hdl::path_from_string(b.require("anchor"));
  const auto pos = util::split(b.require("anchor_pos"), ':');
  if (pos.size() == 2) {
    r.cand.line = static_cast<std::uint32_t>(std::stoul(pos[0]));
    r.cand.col = static_cast<std::uint32_t>(std::stoul(pos[1]));
  }
  r.edit.operator_id = b.require("operator");
  r.edit.variant = r.cand.variant;
  r.edit.file = r.cand.file;
  r.edit.line = static_cast<std::uint32_t>(std::stoul(b.require("line")));
  r.edit.kind = hdl::edit_kind_from_name(b.require("kind"));
  r.edit.path = hdl::path_from_string(b.require("site"));
  r.edit.before_fragment = b.require("before");
  r.edit.after_fragment = b.require("after");
  if (auto w = b.require("witness"); !w.empty()) r.witness = sim::Witness::parse(w);
  r.note = b.require("note");
  return r;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : util::split(s, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

std::vector<const MutantRecord*> Manifest::retained() const {
  std::vector<const MutantRecord*> out;
  for (const auto& r : records) {
    if (r.status == Status::Retained) out.push_back(&r);
  }
  return out;
}

const MutantRecord* Manifest::find(const std::string& id) const {
  for (const auto& r : records) {
    if (r.mutant_id == id) return &r;
  }
  return nullptr;
}

std::string format_manifest(const CorpusResult& result, const elab::Design& golden, const util::KvBlock& config) {
  util::KvBlock h;
  h.add("format", "rtlmut-manifest 1");
  h.add("design_id", result.design_id);
  h.add("top", golden.top);
  for (const auto& f : golden.files) h.add("golden", f.path + " " + util::hex64(util::fnv1a(f.source.text())));
  for (const auto& [k, v] : config.entries) h.add("config." + k, v);
  h.add("candidates", std::to_string(result.candidates));
  h.add("probed", std::to_string(result.probed));
  h.add("infeasible", std::to_string(result.infeasible));
  h.add("pool", std::to_string(result.pool));
  h.add("records", std::to_string(result.records.size()));
  h.add("retained", std::to_string(result.retained.size()));
  std::vector<std::string> order;
  for (auto i : result.retained) order.push_back(result.records[i].mutant_id);
  h.add("selection", join(order));
  h.add("merged", result.merged ? result.merged->id : "");

  std::vector<std::pair<std::string, util::KvBlock>> blocks{{"manifest", h}};
  std::vector<const MutantRecord*> sorted;
  for (const auto& r : result.records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const MutantRecord* a, const MutantRecord* b) { return a->mutant_id < b->mutant_id; });
  for (const auto* r : sorted) blocks.emplace_back("mutant " + r->mutant_id, record_block(*r));
  if (result.merged) {
    const auto& m = *result.merged;
    util::KvBlock b;
    b.add("constituents", join(m.constituents));
    for (const auto& [file, text] : m.texts) b.add("file", file);
    b.add("diff_sites", std::to_string(m.diff_sites));
    b.add("diverging", join(m.diverging));
    b.add("masked", join(m.masked));
    blocks.emplace_back("merged " + m.id, b);
  }
  return util::format_kv(blocks);
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  for (const auto& [name, block] : util::parse_kv(text)) {
    if (name == "manifest") {
      m.header = block;
    } else if (name.rfind("mutant ", 0) == 0) {
      m.records.push_back(parse_record(name.substr(7), block));
    } else if (name.rfind("merged ", 0) == 0) {
      MergedVariant mv;
      mv.id = name.substr(7);
      mv.constituents = split_list(block.require("constituents"));
      for (const auto& f : block.all("file")) mv.texts.emplace(f, "");
      mv.diff_sites = std::stoul(block.require("diff_sites"));
      mv.diverging = split_list(block.require("diverging"));
      mv.masked = split_list(block.require("masked"));
      m.merged = std::move(mv);
    } else {
      throw util::FormatError("unknown manifest block '" + name + "'");
    }
  }
  if (m.header.entries.empty()) throw util::FormatError("manifest header missing");
  return m;
}

void write_variant(const elab::Design& golden, const std::map<std::string, std::string>& replaced,
                   const std::filesystem::path& dir) {
  for (const auto& f : golden.files) {
    auto it = replaced.find(f.path);
    util::write_file(dir / f.path, it == replaced.end() ? f.source.text() : it->second);
  }
}

void write_corpus(const CorpusResult& result, const elab::Design& golden, const util::KvBlock& config,
                  const std::filesystem::path& out_dir) {
  std::filesystem::remove_all(out_dir / "mutants");
  util::write_file(out_dir / "manifest.txt", format_manifest(result, golden, config));
  std::string log;
  for (const auto& l : result.log) log += l + "\n";
  util::write_file(out_dir / "mutate.log", log);
  for (auto i : result.retained) {
    const auto& r = result.records[i];
    write_variant(golden, {{r.edit.file, r.mutated_text}}, out_dir / "mutants" / r.mutant_id);
  }
  if (result.merged) write_variant(golden, result.merged->texts, out_dir / "mutants" / ("merged_" + result.merged->id));
}

}  // namespace rtlmut::pipeline
