#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <map>

#include "rtlmut/campaign/campaign.hpp"
#include "rtlmut/sim/simulator.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRejected = 2;
constexpr int kInternal = 3;

// Flags that map onto config keys. Values given on the command line are
// applied after the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> flag_opts;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    opts[key] = app->add_option("--" + dashed(key), values[key], help);
  }
  void add_flag(CLI::App* app, const std::string& key, const std::string& help) {
    flag_opts[key] = app->add_flag("--" + dashed(key), flags[key], help);
  }
  static std::string dashed(std::string k) {
    for (auto& c : k) c = c == '_' ? '-' : c;
    return k;
  }
};

struct Common {
  std::string workspace = "workspace";
  std::string id;
  std::string entry_dir;
  std::string config;
  Overrides ov;
};

void add_common(CLI::App* app, Common& c, bool needs_entry) {
  app->add_option("--workspace,-w", c.workspace, "Workspace directory");
  if (needs_entry) {
    app->add_option("--id", c.id, "Design id in the workspace");
    app->add_option("--entry", c.entry_dir, "Design directory inside a workspace (<workspace>/<id>)");
  }
  app->add_option("--config,-c", c.config, "Flat key = value config file");
  c.ov.add(app, "seed", "Random seed");
  c.ov.add(app, "workers", "Worker threads");
  c.ov.add(app, "budget", "Single-bug variants to retain");
  c.ov.add(app, "overgen_factor", "Pool over-generation factor");
  c.ov.add(app, "vectors", "Random validation stimuli");
  c.ov.add(app, "exhaustive_bits", "Input-bit limit for exhaustive sweeps");
  c.ov.add(app, "reset_cycles", "Reset cycles per stimulus");
  c.ov.add(app, "sim_cycles", "Cycles per validation stimulus");
  c.ov.add(app, "equiv_cycles", "Cycles per random equivalence run");
  c.ov.add(app, "operators", "Comma-separated operator names, or all");
  c.ov.add(app, "runs", "Expected assertion runs");
  c.ov.add_flag(app, "strict", "Fail when the budget or five-bug variant is not met");
  c.ov.add_flag(app, "lenient", "Leave broken variants out of the kill denominator");
  c.ov.add_flag(app, "retain_unknown", "Keep mutants whose equivalence is unknown");
}

campaign::CampaignConfig make_config(const Common& c) {
  campaign::CampaignConfig cfg;
  if (!c.config.empty()) cfg.load(c.config);
  for (const auto& [k, opt] : c.ov.opts) {
    if (opt->count() > 0) cfg.set(k, c.ov.values.at(k));
  }
  for (const auto& [k, opt] : c.ov.flag_opts) {
    if (opt->count() > 0) cfg.set(k, c.ov.flags.at(k) ? "true" : "false");
  }
  cfg.validate();
  return cfg;
}

campaign::BenchmarkEntry entry_of(const Common& c) {
  if (!c.entry_dir.empty()) {
    const auto p = fs::path(c.entry_dir).lexically_normal();
    const auto dir = p.has_filename() ? p : p.parent_path();
    return campaign::load_entry(dir.parent_path(), dir.filename().string());
  }
  if (c.id.empty()) throw CLI::ValidationError("--id", "an --id or --entry is required");
  return campaign::load_entry(c.workspace, c.id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutation-based buggy RTL generation and assertion evaluation"};
  app.require_subcommand(1);

  Common ingest_c, targets_c, mutate_c, merge_c, sim_c, eval_c, report_c;

  std::string ingest_design, ingest_top, ingest_group, ingest_id;
  auto* ingest = app.add_subcommand("ingest", "Check a design and add it to the workspace");
  ingest->add_option("--design,-d", ingest_design, "Design directory (sources in rtl/ or directly)")->required();
  ingest->add_option("--top", ingest_top, "Top module");
  ingest->add_option("--group", ingest_group, "Group label");
  ingest->add_option("--as", ingest_id, "Design id (defaults to the directory name)");
  add_common(ingest, ingest_c, false);

  auto* targets = app.add_subcommand("targets", "Resolve spec signals to mutation targets");
  add_common(targets, targets_c, true);

  std::string mut_design, mut_top, mut_signals, mut_out;
  auto* mutate = app.add_subcommand("mutate", "Generate the single-bug corpus and five-bug variant");
  mutate->add_option("--design,-d", mut_design, "Design directory, for use without a workspace");
  mutate->add_option("--top", mut_top, "Top module (with --design)");
  mutate->add_option("--spec-signals", mut_signals, "Spec signal list (with --design)");
  mutate->add_option("--out,-o", mut_out, "Output directory (with --design)");
  add_common(mutate, mutate_c, true);

  std::string merge_ids, merge_manifest, merge_out;
  auto* merge = app.add_subcommand("merge", "Compose a five-bug variant from manifest mutants");
  merge->add_option("--ids", merge_ids, "Comma-separated mutant ids (default: the manifest's quintuple)");
  merge->add_option("--manifest", merge_manifest, "Manifest file; its directory is the design entry");
  merge->add_option("--out,-o", merge_out, "Output directory (default mutants/merged_<id>)");
  add_common(merge, merge_c, true);

  std::string sim_variant, sim_stimulus = "random seed=1 reset=4 cycles=64", sim_out;
  bool sim_vcd = false;
  auto* simulate = app.add_subcommand("simulate", "Simulate the golden design or a variant");
  simulate->add_option("--variant", sim_variant, "Variant directory name under mutants/");
  simulate->add_option("--stimulus", sim_stimulus, "Stimulus descriptor");
  simulate->add_flag("--vcd", sim_vcd, "Write VCD instead of the text trace");
  simulate->add_option("--out,-o", sim_out, "Output file (default stdout)");
  add_common(simulate, sim_c, true);

  std::string eval_assertions, eval_mode = "average", eval_report, eval_manifest;
  bool eval_hunting = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate assertion runs against the corpus");
  evaluate->add_option("--design", eval_c.entry_dir, "Design directory inside a workspace (<workspace>/<id>)");
  evaluate->add_option("--manifest", eval_manifest, "Manifest file (default <design>/manifest.txt)");
  evaluate->add_option("--assertions,-a", eval_assertions, "Directory with one subdirectory per run")->required();
  evaluate->add_option("--mode", eval_mode, "average or union")->check(CLI::IsMember({"average", "union"}));
  evaluate->add_option("--report,-r", eval_report, "Report file (default <design>/reports/<mode>.txt)");
  evaluate->add_flag("--hunting", eval_hunting, "Require the five-bug variant");
  add_common(evaluate, eval_c, true);

  std::string report_mode = "average", report_out;
  auto* report = app.add_subcommand("report", "Summarize evaluated designs in the workspace");
  report->add_option("--mode", report_mode, "average or union")->check(CLI::IsMember({"average", "union"}));
  report->add_option("--out,-o", report_out, "Summary file (default <workspace>/summary_<mode>.txt)");
  add_common(report, report_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (ingest->parsed()) {
      make_config(ingest_c);
      auto res = campaign::ingest(ingest_design, ingest_top, ingest_c.workspace, ingest_id, ingest_group);
      if (!res.entry) {
        std::cout << "rejected " << ingest_design << ": " << res.reason << "\n";
        return kRejected;
      }
      std::cout << "accepted " << res.entry->id << " top=" << res.entry->top << " loc=" << res.entry->loc << "\n";
    } else if (targets->parsed()) {
      make_config(targets_c);
      const auto entry = entry_of(targets_c);
      const auto golden = campaign::load_golden(entry);
      const auto t = campaign::resolve_entry_targets(golden, entry);
      std::cout << elab::format_targets(t.targets);
    } else if (mutate->parsed()) {
      const auto cfg = make_config(mutate_c);
      campaign::BenchmarkEntry entry;
      if (!mut_design.empty()) {
        if (mut_out.empty()) throw CLI::ValidationError("--out", "--design needs --out");
        auto prepared = campaign::prepare_entry(mut_design, mut_top, mut_out, {}, mut_signals);
        if (!prepared.entry) throw campaign::Rejection(mut_design + ": " + prepared.reason);
        entry = *prepared.entry;
      } else {
        entry = entry_of(mutate_c);
      }
      const auto start = std::chrono::steady_clock::now();
      const auto res = campaign::run_mutate(entry, cfg);
      const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (const auto& l : res.log) std::cout << l << "\n";
      std::cout << "wrote " << entry.manifest().string() << " in " << util::format_fixed(secs, 1) << " s\n";
    } else if (merge->parsed()) {
      const auto cfg = make_config(merge_c);
      const auto entry = merge_manifest.empty() ? entry_of(merge_c)
                                                : campaign::load_entry(fs::absolute(merge_manifest).parent_path());
      std::vector<std::string> ids;
      for (const auto& s : util::split(merge_ids, ',')) {
        if (!util::trim(s).empty()) ids.push_back(util::trim(s));
      }
      const auto mv = campaign::run_merge(entry, ids, cfg, merge_out);
      std::cout << "merged_" << mv.id << " diff_sites=" << mv.diff_sites << " masked=" << mv.masked.size() << "\n";
    } else if (simulate->parsed()) {
      make_config(sim_c);
      const auto entry = entry_of(sim_c);
      const auto dir = sim_variant.empty() ? entry.golden_dir() : entry.mutants_dir() / sim_variant;
      if (!fs::is_directory(dir)) throw campaign::Rejection("no such variant: " + dir.string());
      const auto design = elab::elaborate(elab::load_design_files(dir), entry.top, entry.id);
      const auto model = sim::Model::compile(design);
      const auto stim = sim_stimulus.rfind("exhaustive", 0) == 0
                            ? sim::Stimulus::exhaustive(model, sim::Stimulus::parse(sim_stimulus).reset_cycles)
                            : sim::Stimulus::parse(sim_stimulus);
      const auto trace = sim::simulate(model, stim);
      const auto text = sim_vcd ? trace.to_vcd() : trace.to_text();
      if (sim_out.empty()) {
        std::cout << text;
      } else {
        util::write_file(sim_out, text);
      }
    } else if (evaluate->parsed()) {
      const auto cfg = make_config(eval_c);
      auto entry = entry_of(eval_c);
      if (!eval_manifest.empty()) entry.manifest_path = eval_manifest;
      const auto mode = eval::mode_from_name(eval_mode);
      const auto rep = eval_hunting ? campaign::run_hunting_eval(entry, eval_assertions, mode, cfg)
                                    : campaign::run_prevention_eval(entry, eval_assertions, mode, cfg);
      const fs::path out = eval_report.empty() ? entry.reports_dir() / (eval_mode + ".txt") : fs::path(eval_report);
      util::write_file(out, eval::format_report(rep));
      const auto table = eval::format_table(rep);
      auto table_path = out;
      table_path.replace_extension(".table.txt");
      util::write_file(table_path, table);
      std::cout << table;
    } else if (report->parsed()) {
      make_config(report_c);
      const auto s = campaign::summarize(report_c.workspace, report_mode);
      if (s.rows.empty()) throw campaign::Rejection("no evaluated designs in " + report_c.workspace);
      const fs::path out =
          report_out.empty() ? fs::path(report_c.workspace) / ("summary_" + report_mode + ".txt") : fs::path(report_out);
      const auto text = campaign::format_summary(s);
      util::write_file(out, text);
      std::cout << text;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const campaign::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const campaign::Rejection& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const eval::EvalError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
