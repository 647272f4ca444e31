#include "rtlmut/sva/sva.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/sim/expr.hpp"
#include "rtlmut/util/kv.hpp"

namespace rtlmut::sva {

using hdl::Node;
using hdl::NodeKind;

std::uint32_t Sequence::span() const {
  std::uint32_t s = 0;
  for (const auto& t : terms) s += t.delay;
  return s;
}

std::uint32_t Property::depth() const {
  std::uint32_t d = consequent.terms.empty() ? 0 : consequent.terms.front().delay;
  if (antecedent) d += antecedent->span() + (overlapping ? 0 : 1);
  return d + 1;
}

std::set<std::string> Property::signals() const {
  std::set<std::string> out{clock};
  auto add = [&](const Node& e) {
    for (auto& n : hdl::collect_identifiers(e)) out.insert(n);
  };
  if (disable) add(*disable);
  if (antecedent) {
    for (const auto& t : antecedent->terms) add(t.expr);
  }
  for (const auto& t : consequent.terms) add(t.expr);
  return out;
}

double AssertionSet::syntax_rate() const {
  return statements == 0 ? 0.0 : static_cast<double>(properties.size()) / static_cast<double>(statements);
}

const char* monitor_name(MonitorResult::Kind k) {
  switch (k) {
    case MonitorResult::Kind::Pass:
      return "pass";
    case MonitorResult::Kind::Violation:
      return "violation";
    case MonitorResult::Kind::Vacuous:
      return "vacuous";
  }
  return "?";
}

namespace {

struct ParseFailure {
  std::string message;
};

struct Statement {
  std::string text;
  std::uint32_t line = 1;
};

std::string strip_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (text.compare(i, 2, "/*") == 0) {
      const auto end = text.find("*/", i + 2);
      const auto stop = end == std::string::npos ? text.size() : end + 2;
      for (; i < stop; ++i) out += text[i] == '\n' ? '\n' : ' ';
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::vector<Statement> split_statements(const std::string& text) {
  std::vector<Statement> out;
  Statement cur;
  std::uint32_t line = 1;
  bool started = false;
  for (char c : text) {
    if (c == ';') {
      if (started) out.push_back(cur);
      cur = {};
      started = false;
    } else {
      if (!started && !std::isspace(static_cast<unsigned char>(c))) {
        started = true;
        cur.line = line;
      }
      if (started) cur.text += c == '\n' ? ' ' : c;
    }
    if (c == '\n') ++line;
  }
  if (started && !util::trim(cur.text).empty()) {
    cur.text += " <missing ';'>";
    out.push_back(cur);
  }
  return out;
}

// Top-level occurrences of `token` outside parentheses, brackets and braces.
std::vector<std::size_t> find_top(const std::string& s, const std::string& token) {
  std::vector<std::size_t> out;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth == 0 && s.compare(i, token.size(), token) == 0) out.push_back(i);
  }
  return out;
}

const std::map<std::string, std::pair<std::size_t, std::size_t>>& builtins() {
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> b{
      {"$past", {1, 2}},  {"$stable", {1, 1}}, {"$rose", {1, 1}},
      {"$fell", {1, 1}},  {"$onehot", {1, 1}}, {"$onehot0", {1, 1}},
  };
  return b;
}

void check_calls(const Node& n) {
  if (n.kind == NodeKind::SysCall) {
    auto it = builtins().find(n.text);
    if (it == builtins().end()) throw ParseFailure{"unsupported function " + n.text};
    const auto [lo, hi] = it->second;
    if (n.children.size() < lo || n.children.size() > hi) throw ParseFailure{"wrong argument count for " + n.text};
    if (n.text == "$past" && n.children.size() == 2 && n.child(1).kind != NodeKind::Number) {
      throw ParseFailure{"$past depth must be a literal"};
    }
  }
  for (const auto& c : n.children) check_calls(c);
}

Node parse_expr(const std::string& text) {
  if (util::trim(text).empty()) throw ParseFailure{"empty expression"};
  try {
    hdl::SourceFile file("<sva>", text);
    hdl::Parser parser(hdl::tokenize(file), file.path(), true);
    Node e = parser.parse_expression();
    if (!parser.at_end()) parser.fail({"end of expression"});
    hdl::assign_ids(e);
    check_calls(e);
    return e;
  } catch (const ParseFailure&) {
    throw;
  } catch (const std::exception& ex) {
    throw ParseFailure{ex.what()};
  }
}

Sequence parse_sequence(const std::string& text) {
  Sequence seq;
  const auto marks = find_top(text, "##");
  auto piece = [&](std::size_t from, std::size_t to) { return text.substr(from, to - from); };
  std::size_t pos = 0;
  std::uint32_t delay = 0;
  if (!marks.empty() && util::trim(piece(0, marks[0])).empty()) {
    // Leading delay: the first term waits.
  } else {
    const auto end = marks.empty() ? text.size() : marks[0];
    seq.terms.push_back({0, parse_expr(piece(0, end))});
  }
  for (std::size_t k = 0; k < marks.size(); ++k) {
    pos = marks[k] + 2;
    std::size_t digits = pos;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
    if (digits == pos) throw ParseFailure{"expected a constant after ##"};
    delay = static_cast<std::uint32_t>(std::stoul(text.substr(pos, digits - pos)));
    const auto end = k + 1 < marks.size() ? marks[k + 1] : text.size();
    seq.terms.push_back({delay, parse_expr(piece(digits, end))});
  }
  if (seq.terms.empty()) throw ParseFailure{"empty sequence"};
  return seq;
}

Property parse_statement(const Statement& st) {
  static const std::regex head(R"(^\s*(?:([A-Za-z_]\w*)\s*:\s*)?assert\s+property\s*\(([\s\S]*)\)\s*$)");
  static const std::regex clock(R"(^\s*@\s*\(\s*(posedge|negedge)\s+([A-Za-z_][\w.]*)\s*\)([\s\S]*)$)");
  static const std::regex disable(R"(^\s*disable\s+iff\s*\()");
  std::smatch m;
  if (!std::regex_match(st.text, m, head)) throw ParseFailure{"expected 'assert property (...)'"};
  Property p;
  p.name = m[1].str();
  p.line = st.line;
  p.text = util::trim(st.text);
  const std::string inner = m[2].str();
  if (!std::regex_match(inner, m, clock)) throw ParseFailure{"expected a clocking event '@(posedge clk)'"};
  p.edge = m[1].str() == "posedge" ? Edge::Pos : Edge::Neg;
  p.clock = m[2].str();
  std::string body = m[3].str();
  if (std::regex_search(body, m, disable)) {
    std::size_t open = static_cast<std::size_t>(m.position(0) + m.length(0)) - 1;
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = open; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string::npos) throw ParseFailure{"unbalanced disable iff"};
    p.disable = parse_expr(body.substr(open + 1, close - open - 1));
    body = body.substr(close + 1);
  }
  auto over = find_top(body, "|->");
  auto non = find_top(body, "|=>");
  if (over.size() + non.size() > 1) throw ParseFailure{"more than one implication"};
  if (over.size() + non.size() == 1) {
    const bool o = !over.empty();
    const auto at = o ? over[0] : non[0];
    p.overlapping = o;
    p.antecedent = parse_sequence(body.substr(0, at));
    p.consequent = parse_sequence(body.substr(at + 3));
  } else {
    p.consequent = parse_sequence(body);
  }
  return p;
}

}  // namespace

AssertionSet parse_sva(const std::string& text, const std::string& source, const std::string& run) {
  AssertionSet set;
  set.source = source;
  set.run = run;
  std::set<std::string> names;
  const auto stmts = split_statements(strip_comments(text));
  set.statements = stmts.size();
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    try {
      Property p = parse_statement(stmts[i]);
      if (p.name.empty()) p.name = "p" + std::to_string(i + 1);
      if (!names.insert(p.name).second) throw ParseFailure{"duplicate property name '" + p.name + "'"};
      set.properties.push_back(std::move(p));
    } catch (const ParseFailure& f) {
      set.diagnostics.push_back({stmts[i].line, f.message});
    }
  }
  return set;
}

void bind_signals(AssertionSet& set, const std::vector<sim::TraceSignal>& signals) {
  std::set<std::string> known;
  for (const auto& s : signals) known.insert(s.name);
  std::vector<Property> kept;
  for (auto& p : set.properties) {
    std::string missing;
    for (const auto& n : p.signals()) {
      if (!known.count(n)) {
        missing = n;
        break;
      }
    }
    if (missing.empty()) {
      kept.push_back(std::move(p));
    } else {
      set.diagnostics.push_back({p.line, "unknown signal '" + missing + "' in " + p.name});
    }
  }
  set.properties = std::move(kept);
  std::sort(set.diagnostics.begin(), set.diagnostics.end(),
            [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
}

namespace {

class Compiled {
 public:
  Compiled(const Property& p, const sim::Trace& trace) {
    resolve_ = [&trace](const std::string& name) -> std::optional<sim::VarRef> {
      const int i = trace.index(name);
      if (i < 0) return std::nullopt;
      const auto& s = trace.signals[static_cast<std::size_t>(i)];
      sim::VarRef r;
      r.slot = static_cast<std::uint32_t>(i);
      r.width = s.width;
      r.msb = s.msb;
      r.lsb = s.lsb;
      return r;
    };
    for (const auto& n : p.signals()) {
      if (trace.index(n) < 0) throw UnknownSignal(n);
    }
    if (p.disable) disable_ = compile(*p.disable);
    if (p.antecedent) {
      for (const auto& t : p.antecedent->terms) ante_.push_back({t.delay, compile(t.expr)});
    }
    for (const auto& t : p.consequent.terms) cons_.push_back({t.delay, compile(t.expr)});
  }

  std::uint32_t compile(const Node& e) { return prog_.compile(e, 0, resolve_, true); }

  bool holds(std::uint32_t expr, const sim::Trace& t, std::size_t c) const {
    return prog_.eval(expr, sim::Frame{t.rows[c].data(), &t.rows, c}) != 0;
  }

  sim::ExprProgram prog_;
  sim::Resolver resolve_;
  std::optional<std::uint32_t> disable_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ante_, cons_;
};

}  // namespace

MonitorResult check_on_trace(const Property& p, const sim::Trace& trace) {
  const Compiled c(p, trace);
  const std::size_t n = trace.cycles();
  if (n < p.depth()) {
    throw TraceTooShort("trace has " + std::to_string(n) + " cycles, property " + p.name + " needs " +
                        std::to_string(p.depth()));
  }
  std::vector<char> off(n, 0);
  if (c.disable_) {
    for (std::size_t k = 0; k < n; ++k) off[k] = c.holds(*c.disable_, trace, k) ? 1 : 0;
  }
  bool completed = false;
  std::size_t first_fail = n;
  for (std::size_t t = 0; t < n && t < first_fail; ++t) {
    std::size_t cyc = t;
    std::size_t checked = t;  // disable examined on [t, checked)
    auto live_until = [&](std::size_t upto) {
      for (; checked <= upto; ++checked) {
        if (off[checked]) return false;
      }
      return true;
    };
    bool alive = true;
    bool matched = true;
    for (std::size_t i = 0; i < c.ante_.size(); ++i) {
      cyc = (i == 0 ? t : cyc) + c.ante_[i].first;
      if (cyc >= n || !live_until(cyc)) {
        alive = false;
        break;
      }
      if (!c.holds(c.ante_[i].second, trace, cyc)) {
        matched = false;
        break;
      }
    }
    if (!alive || !matched) continue;
    std::size_t start = c.ante_.empty() ? t : cyc + (p.overlapping ? 0 : 1);
    bool failed = false;
    bool done = true;
    cyc = start;
    for (std::size_t j = 0; j < c.cons_.size(); ++j) {
      cyc = (j == 0 ? start : cyc) + c.cons_[j].first;
      if (cyc >= n || !live_until(cyc)) {
        done = false;
        break;
      }
      if (!c.holds(c.cons_[j].second, trace, cyc)) {
        failed = true;
        break;
      }
    }
    if (failed) {
      first_fail = std::min(first_fail, cyc);
    } else if (done) {
      completed = true;
    }
  }
  if (first_fail < n) return {MonitorResult::Kind::Violation, first_fail};
  return {completed ? MonitorResult::Kind::Pass : MonitorResult::Kind::Vacuous, 0};
}

}  // namespace rtlmut::sva
