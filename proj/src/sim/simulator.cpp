#include "rtlmut/sim/simulator.hpp"

#include <sstream>

#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/parallel.hpp"

namespace rtlmut::sim {

Stimulus Stimulus::random(std::uint64_t seed, std::uint32_t reset_cycles, std::uint64_t cycles) {
  Stimulus s;
  s.kind = Kind::Random;
  s.seed = seed;
  s.reset_cycles = reset_cycles;
  s.cycles = cycles;
  return s;
}

Stimulus Stimulus::exhaustive(const Model& model, std::uint32_t reset_cycles) {
  const auto bits = model.data_input_bits();
  if (bits > 30) throw SimError("exhaustive stimulus over " + std::to_string(bits) + " input bits");
  Stimulus s;
  s.kind = Kind::Exhaustive;
  s.reset_cycles = reset_cycles;
  s.cycles = reset_cycles + (1ULL << bits);
  return s;
}

Stimulus Stimulus::explicit_rows(std::vector<std::map<std::string, std::uint64_t>> rows) {
  Stimulus s;
  s.kind = Kind::Explicit;
  s.reset_cycles = 0;
  s.rows = std::move(rows);
  return s;
}

std::string Stimulus::describe() const {
  switch (kind) {
    case Kind::Random:
      return "random seed=" + std::to_string(seed) + " reset=" + std::to_string(reset_cycles) +
             " cycles=" + std::to_string(cycles);
    case Kind::Exhaustive:
      return "exhaustive reset=" + std::to_string(reset_cycles) + " cycles=" + std::to_string(cycles);
    case Kind::Explicit: {
      std::string body;
      for (const auto& row : rows) {
        for (const auto& [k, v] : row) body += k + "=" + std::to_string(v) + ",";
        body += ";";
      }
      return "explicit rows=" + std::to_string(rows.size()) + " hash=" + util::hex64(util::fnv1a(body));
    }
  }
  return {};
}

Stimulus Stimulus::parse(const std::string& text) {
  std::istringstream is(text);
  std::string head;
  is >> head;
  Stimulus s;
  if (head == "random") {
    s.kind = Kind::Random;
  } else if (head == "exhaustive") {
    s.kind = Kind::Exhaustive;
  } else {
    throw SimError("cannot replay stimulus '" + text + "'");
  }
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw SimError("bad stimulus field '" + tok + "'");
    const auto key = tok.substr(0, eq);
    const auto val = std::stoull(tok.substr(eq + 1));
    if (key == "seed") {
      s.seed = val;
    } else if (key == "reset") {
      s.reset_cycles = static_cast<std::uint32_t>(val);
    } else if (key == "cycles") {
      s.cycles = val;
    } else {
      throw SimError("bad stimulus field '" + tok + "'");
    }
  }
  return s;
}

std::vector<std::uint64_t> stimulus_inputs(const Model& model, const Stimulus& stim, std::uint64_t cycle) {
  const auto& ins = model.inputs();
  std::vector<std::uint64_t> out(ins.size(), 0);
  if (stim.kind == Stimulus::Kind::Explicit) {
    if (cycle < stim.rows.size()) {
      const auto& row = stim.rows[cycle];
      for (std::size_t i = 0; i < ins.size(); ++i) {
        if (auto it = row.find(ins[i].name); it != row.end()) out[i] = it->second & mask_of(ins[i].width);
      }
    }
    return out;
  }
  const bool in_reset = cycle < stim.reset_cycles;
  std::uint64_t packed = cycle - (in_reset ? cycle : stim.reset_cycles);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const auto& in = ins[i];
    switch (in.role) {
      case InputRole::Clock:
        break;
      case InputRole::ResetHigh:
        out[i] = in_reset ? 1 : 0;
        break;
      case InputRole::ResetLow:
        out[i] = in_reset ? 0 : 1;
        break;
      case InputRole::Data:
        if (in_reset) break;
        if (stim.kind == Stimulus::Kind::Random) {
          out[i] = util::mix_keys(stim.seed, cycle, i) & mask_of(in.width);
        } else {
          out[i] = packed & mask_of(in.width);
          packed = in.width >= 64 ? 0 : packed >> in.width;
        }
        break;
    }
  }
  return out;
}

Simulator::Simulator(const Model& model) : m_(model), vals_(model.slot_count(), 0) { reset_state(); }

void Simulator::reset_state() {
  std::fill(vals_.begin(), vals_.end(), 0);
  for (const auto& v : m_.vars()) {
    if (v.is_array) continue;
    vals_[v.slot] = v.init;
  }
  nba_.clear();
}

void Simulator::set_input(std::size_t input_index, std::uint64_t value) {
  const auto& in = m_.inputs().at(input_index);
  vals_[in.slot] = value & mask_of(in.width);
}

void Simulator::apply_inputs(const std::vector<std::uint64_t>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) set_input(i, values[i]);
}

std::uint64_t Simulator::eval(std::uint32_t expr) const {
  Frame f;
  f.vals = vals_.data();
  return m_.program().eval(expr, f);
}

void Simulator::assign(const Stmt& s, bool defer) {
  const LValue& lv = m_.lvalues()[s.lvalue];
  const std::uint64_t v = eval(s.expr);
  std::uint32_t off = 0;
  for (auto it = lv.parts.rbegin(); it != lv.parts.rend(); ++it) {
    const LvPart& p = *it;
    const std::uint64_t chunk = (off >= 64 ? 0 : v >> off) & mask_of(p.width);
    off += p.width;
    std::uint32_t slot = p.slot;
    if (p.dyn_word) {
      const auto idx = static_cast<std::int64_t>(eval(p.word_expr)) - p.array_lo;
      if (idx < 0 || idx >= p.array_size) continue;
      slot = p.slot + static_cast<std::uint32_t>(idx);
    }
    if (slot == UINT32_MAX) continue;
    std::uint64_t mask = mask_of(p.word_width);
    std::uint64_t val = chunk;
    if (p.bits != LvPart::Bits::Whole) {
      std::int64_t low = p.low;
      if (p.bits == LvPart::Bits::Dyn) {
        const auto idx = static_cast<std::int64_t>(eval(p.low_expr));
        low = p.desc ? idx + p.k : p.k - idx;
      }
      if (low >= 64 || low <= -64) continue;
      if (low >= 0) {
        mask = (mask_of(p.width) << low) & mask_of(p.word_width);
        val = chunk << low;
      } else {
        mask = (mask_of(p.width) >> -low) & mask_of(p.word_width);
        val = chunk >> -low;
      }
    }
    if (mask == 0) continue;
    if (defer) {
      nba_.push_back({slot, mask, val & mask});
    } else {
      vals_[slot] = (vals_[slot] & ~mask) | (val & mask);
    }
  }
}

void Simulator::exec(std::uint32_t id, bool sequential) {
  const Stmt& s = m_.stmts()[id];
  switch (s.kind) {
    case Stmt::Kind::Block:
      for (auto c : s.children) exec(c, sequential);
      break;
    case Stmt::Kind::If:
      if (eval(s.expr) != 0) {
        exec(static_cast<std::uint32_t>(s.then_s), sequential);
      } else if (s.else_s >= 0) {
        exec(static_cast<std::uint32_t>(s.else_s), sequential);
      }
      break;
    case Stmt::Kind::Case: {
      const auto sel = eval(s.expr);
      for (const auto& arm : s.arms) {
        bool hit = arm.labels.empty();
        for (const auto& l : arm.labels) {
          if (!l.never && ((sel ^ eval(l.expr)) & l.care) == 0) {
            hit = true;
            break;
          }
        }
        if (hit) {
          exec(arm.body, sequential);
          break;
        }
      }
      break;
    }
    case Stmt::Kind::Assign:
      assign(s, sequential && s.nonblocking);
      break;
    case Stmt::Kind::Null:
      break;
  }
}

void Simulator::settle() {
  for (const auto& p : m_.comb_schedule()) exec(p.body, false);
}

void Simulator::clock_edge() {
  for (const auto& p : m_.sequential()) exec(p.body, true);
  for (const auto& w : nba_) vals_[w.slot] = (vals_[w.slot] & ~w.mask) | w.value;
  nba_.clear();
}

std::uint64_t Simulator::value(const std::string& observed_name) const {
  const int i = m_.observed_index(observed_name);
  if (i < 0) throw SimError("no observed signal '" + observed_name + "'");
  return vals_[m_.observed()[i].slot];
}

std::vector<std::uint64_t> Simulator::sample() const {
  std::vector<std::uint64_t> row;
  row.reserve(m_.observed().size());
  for (const auto& o : m_.observed()) row.push_back(vals_[o.slot]);
  return row;
}

Trace simulate(const Model& model, const Stimulus& stim) {
  Trace t;
  t.design_id = model.design_id();
  t.stimulus = stim.describe();
  for (const auto& o : model.observed()) t.signals.push_back({o.name, o.width, o.msb, o.lsb});
  Simulator sim(model);
  const auto n = stim.length();
  t.rows.reserve(n);
  for (std::uint64_t c = 0; c < n; ++c) {
    sim.apply_inputs(stimulus_inputs(model, stim, c));
    sim.settle();
    t.rows.push_back(sim.sample());
    sim.clock_edge();
  }
  return t;
}

std::vector<Trace> simulate_all(const Model& model, const std::vector<Stimulus>& stimuli, unsigned workers) {
  std::vector<Trace> out(stimuli.size());
  util::parallel_for(stimuli.size(), workers, [&](std::size_t i) { out[i] = simulate(model, stimuli[i]); });
  return out;
}

const char* equivalence_name(Equivalence e) {
  switch (e) {
    case Equivalence::Equivalent:
      return "equivalent";
    case Equivalence::Distinguished:
      return "distinguished";
    case Equivalence::Unknown:
      return "unknown";
  }
  return "?";
}

std::string Witness::to_string() const {
  return stimulus + " @ cycle=" + std::to_string(cycle) + " signal=" + signal;
}

Witness Witness::parse(const std::string& text) {
  const auto at = text.find(" @ ");
  if (at == std::string::npos) throw SimError("bad witness '" + text + "'");
  Witness w;
  w.stimulus = text.substr(0, at);
  std::istringstream is(text.substr(at + 3));
  std::string tok;
  while (is >> tok) {
    if (tok.rfind("cycle=", 0) == 0) {
      w.cycle = std::stoull(tok.substr(6));
    } else if (tok.rfind("signal=", 0) == 0) {
      w.signal = tok.substr(7);
    } else {
      throw SimError("bad witness field '" + tok + "'");
    }
  }
  if (w.signal.empty()) throw SimError("witness without signal '" + text + "'");
  return w;
}

namespace {

struct Lockstep {
  const Model& golden;
  const Model& mutant;
  Simulator g;
  Simulator m;
  std::vector<int> input_map;  // golden input -> mutant input
  std::vector<std::pair<std::uint32_t, std::uint32_t>> slots;
  std::vector<std::string> names;

  Lockstep(const Model& gm, const Model& mm) : golden(gm), mutant(mm), g(gm), m(mm) {
    for (const auto& in : golden.inputs()) {
      int found = -1;
      for (std::size_t j = 0; j < mutant.inputs().size(); ++j) {
        if (mutant.inputs()[j].name == in.name) found = static_cast<int>(j);
      }
      input_map.push_back(found);
    }
    for (const auto& name : golden.equivalence_observables()) {
      const int mi = mutant.observed_index(name);
      if (mi < 0) continue;
      slots.emplace_back(golden.observed()[golden.observed_index(name)].slot, mutant.observed()[mi].slot);
      names.push_back(name);
    }
  }

  /// Index into `names` of the first differing observable at `cycle`, or -1.
  int step(const Stimulus& stim, std::uint64_t cycle) {
    const auto v = stimulus_inputs(golden, stim, cycle);
    g.apply_inputs(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (input_map[i] >= 0) m.set_input(static_cast<std::size_t>(input_map[i]), v[i]);
    }
    g.settle();
    m.settle();
    int diff = -1;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (g.slot(slots[k].first) != m.slot(slots[k].second)) {
        diff = static_cast<int>(k);
        break;
      }
    }
    g.clock_edge();
    m.clock_edge();
    return diff;
  }
};

}  // namespace

EquivalenceResult check_equivalence(const Model& golden, const Model& mutant, const EquivalenceOptions& opts) {
  const bool exhaustive = !golden.has_sequential() && golden.data_input_bits() <= opts.exhaustive_bits;
  const Stimulus stim = exhaustive ? Stimulus::exhaustive(golden, 0)
                                   : Stimulus::random(opts.seed, opts.reset_cycles, opts.random_cycles);
  EquivalenceResult r;
  r.stimulus = stim.describe();
  Lockstep ls(golden, mutant);
  for (std::uint64_t c = 0; c < stim.length(); ++c) {
    const int d = ls.step(stim, c);
    if (d >= 0) {
      r.verdict = Equivalence::Distinguished;
      r.witness = Witness{r.stimulus, c, ls.names[d]};
      return r;
    }
  }
  r.verdict = exhaustive ? Equivalence::Equivalent : Equivalence::Unknown;
  return r;
}

bool replay_witness(const Model& golden, const Model& mutant, const Witness& w) {
  const Stimulus stim = Stimulus::parse(w.stimulus);
  if (w.cycle >= stim.length()) return false;
  const int gi = golden.observed_index(w.signal);
  const int mi = mutant.observed_index(w.signal);
  if (gi < 0 || mi < 0) return false;
  Lockstep ls(golden, mutant);
  for (std::uint64_t c = 0; c < w.cycle; ++c) ls.step(stim, c);
  const auto v = stimulus_inputs(golden, stim, w.cycle);
  ls.g.apply_inputs(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (ls.input_map[i] >= 0) ls.m.set_input(static_cast<std::size_t>(ls.input_map[i]), v[i]);
  }
  ls.g.settle();
  ls.m.settle();
  return ls.g.slot(golden.observed()[gi].slot) != ls.m.slot(mutant.observed()[mi].slot);
}

}  // namespace rtlmut::sim
