#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "rtlmut/elab/connectivity.hpp"
#include "rtlmut/elab/design.hpp"
#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/mut/mutate.hpp"

using namespace rtlmut;

namespace {

const char* kSmall = R"(module sub (
  input  a,
  input  b,
  output y
);
  assign y = a & ~b;
endmodule

module m (
  input            clk,
  input      [7:0] d,
  input      [7:0] b,
  input            a,
  input            x,
  input            z,
  input            in_valid,
  input      [1:0] sel,
  output reg [7:0] q,
  output     [3:0] s,
  output           y,
  output           wo,
  output reg [3:0] r
);
  always @(posedge clk) q <= d << 2;
  assign s = b[7:4];
  assign y = (a == a);
  wire w;
  sub u (.a(x), .b(z), .y(w));
  assign wo = ~w;
  always @(posedge clk) begin
    if (in_valid) begin
      case (sel)
        2'd0: r <= 4'd1;
        2'd1: begin
          r <= 4'd2;
        end
        default: r <= {d[1:0], d[3:2]};
      endcase
    end
  end
endmodule
)";

struct Fixture {
  elab::Design design;
  elab::ConnectivityGraph graph;
  std::vector<elab::MutationTarget> targets;

  explicit Fixture(const char* text, std::vector<std::string> spec) {
    design = elab::elaborate({elab::make_design_file("m.v", text)}, "", "m");
    graph = elab::build_connectivity(design);
    targets = elab::resolve_targets(design, graph, elab::classify_clock_reset(design, graph), spec);
  }

  std::vector<mut::Candidate> candidates(const std::string& signal, const mut::MutationConfig& cfg = {}) const {
    std::vector<elab::MutationTarget> ts;
    for (const auto& t : targets) {
      if (t.signal == signal) ts.push_back(t);
    }
    return mut::match_candidates(design, graph, ts, cfg);
  }
};

const mut::Candidate* find(const std::vector<mut::Candidate>& cs, mut::OperatorId op, const std::string& variant) {
  for (const auto& c : cs) {
    if (c.op == op && c.variant == variant) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("operator table has four groups in fixed order") {
  CHECK(mut::all_operators().size() == 17);
  CHECK(mut::operator_group(mut::OperatorId::SLICE_MIRROR) == mut::OperatorGroup::IndexingAndBitSelection);
  CHECK(mut::operator_group(mut::OperatorId::CASE_REMOVE) == mut::OperatorGroup::ExpressionAndControlSemantics);
  CHECK(mut::operator_group(mut::OperatorId::DELAY_CONST) == mut::OperatorGroup::ConstantsAndParameters);
  CHECK(mut::operator_group(mut::OperatorId::ASSIGN_DUP) == mut::OperatorGroup::ConnectivityAndDataflow);
  for (auto op : mut::all_operators()) CHECK(mut::operator_from_name(mut::operator_name(op)) == op);
}

TEST_CASE("relop table is involutive") {
  for (const char* op : {"<", "<=", ">", ">=", "==", "!=", "===", "!==", "&&", "||", "&", "|", "^", "~^"}) {
    auto p = mut::relop_partner(op);
    REQUIRE(p);
    CHECK(mut::relop_partner(*p) == std::string_view(op));
  }
  CHECK_FALSE(mut::relop_partner("+"));
}

TEST_CASE("shift statement yields shift and constant candidates") {
  Fixture f(kSmall, {"q"});
  const auto cs = f.candidates("q");
  const auto* shift = find(cs, mut::OperatorId::SHIFT_AMT, "delta");
  const auto* konst = find(cs, mut::OperatorId::ASSIGN_CONST, "delta");
  REQUIRE(shift);
  REQUIRE(konst);
  CHECK(shift->path == konst->path);
  auto r = mut::probe_apply(f.design, *shift, {});
  REQUIRE(std::holds_alternative<hdl::EditRecord>(r));
  CHECK(std::get<hdl::EditRecord>(r).after_fragment == "3");
  CHECK_FALSE(find(cs, mut::OperatorId::CASE_SEMANTICS, "to_casez"));
}

TEST_CASE("slice mirror and guarded bound perturbation") {
  Fixture f(kSmall, {"s"});
  const auto cs = f.candidates("s");
  const auto* mirror = find(cs, mut::OperatorId::SLICE_MIRROR, "mirror");
  REQUIRE(mirror);
  auto r = mut::probe_apply(f.design, *mirror, {});
  REQUIRE(std::holds_alternative<hdl::EditRecord>(r));
  CHECK(std::get<hdl::EditRecord>(r).after_fragment == "b[3:0]");
  const auto* widen = find(cs, mut::OperatorId::PARTSEL_BOUND, "left+1");
  REQUIRE(widen);
  auto w = mut::probe_apply(f.design, *widen, {});
  REQUIRE(std::holds_alternative<mut::Infeasible>(w));
  CHECK(std::get<mut::Infeasible>(w).reason == "range");
  auto narrow = mut::probe_apply(f.design, *find(cs, mut::OperatorId::PARTSEL_BOUND, "left-1"), {});
  REQUIRE(std::holds_alternative<hdl::EditRecord>(narrow));
  CHECK(std::get<hdl::EditRecord>(narrow).after_fragment == "b[6:4]");
}

TEST_CASE("relop swap on a tautology still edits") {
  Fixture f(kSmall, {"y"});
  const auto cs = f.candidates("y");
  const auto* c = find(cs, mut::OperatorId::RELOP_SWAP, "swap");
  REQUIRE(c);
  auto r = mut::probe_apply(f.design, *c, {});
  REQUIRE(std::holds_alternative<hdl::EditRecord>(r));
  CHECK(std::get<hdl::EditRecord>(r).after_fragment == "a != a");
}

TEST_CASE("port swap exchanges equal-width connections") {
  Fixture f(kSmall, {"wo"});
  const auto cs = f.candidates("wo");
  const auto* c = find(cs, mut::OperatorId::PORT_SWAP, "swap_a_b");
  REQUIRE(c);
  CHECK_FALSE(find(cs, mut::OperatorId::PORT_SWAP, "swap_a_y"));
  auto r = mut::probe_apply(f.design, *c, {});
  REQUIRE(std::holds_alternative<hdl::EditRecord>(r));
  CHECK(std::get<hdl::EditRecord>(r).after_fragment.find(".a(z), .b(x)") != std::string::npos);
}

TEST_CASE("control structure candidates around a register") {
  Fixture f(kSmall, {"r"});
  const auto cs = f.candidates("r");
  CHECK(find(cs, mut::OperatorId::GUARD_FORCE, "true"));
  CHECK(find(cs, mut::OperatorId::GUARD_FORCE, "false"));
  CHECK(find(cs, mut::OperatorId::IF_REMOVE, "then"));
  CHECK_FALSE(find(cs, mut::OperatorId::IF_REMOVE, "else"));
  CHECK(find(cs, mut::OperatorId::CASE_SEMANTICS, "to_casez"));
  CHECK(find(cs, mut::OperatorId::CASE_SEMANTICS, "swap_1"));
  CHECK(find(cs, mut::OperatorId::CASE_REMOVE, "arm_1"));
  CHECK_FALSE(find(cs, mut::OperatorId::CASE_REMOVE, "arm_3"));
  CHECK(find(cs, mut::OperatorId::CONCAT_SWAP, "swap_0"));
  CHECK(find(cs, mut::OperatorId::ASSIGN_DUP, "lit_0"));
  CHECK(find(cs, mut::OperatorId::STMT_CONST, "delta"));
  for (const auto& c : cs) {
    auto r = mut::probe_apply(f.design, c, {});
    if (auto* e = std::get_if<hdl::EditRecord>(&r)) {
      CHECK(e->before_fragment != e->after_fragment);
      CHECK_NOTHROW(hdl::parse_text("m.v", hdl::emit(hdl::sanitize(mut::apply_operator(f.design, c, {}, *e).file_ast))));
    }
  }
}

TEST_CASE("probe leaves the design untouched and is deterministic") {
  Fixture f(kSmall, {"q", "r", "s", "wo", "y"});
  const hdl::Node before = *f.design.files[0].ast;
  const auto cs = mut::match_candidates(f.design, f.graph, f.targets, {});
  REQUIRE(cs.size() > 10);
  for (const auto& c : cs) {
    auto a = mut::probe_apply(f.design, c, {});
    auto b = mut::probe_apply(f.design, c, {});
    REQUIRE(a.index() == b.index());
    if (auto* e = std::get_if<hdl::EditRecord>(&a)) {
      const auto& e2 = std::get<hdl::EditRecord>(b);
      CHECK(e->after_fragment == e2.after_fragment);
      CHECK(e->path == e2.path);
    }
  }
  CHECK(hdl::structurally_equal(before, *f.design.files[0].ast));
}

TEST_CASE("every edit shows up as exactly one diff site") {
  Fixture f(kSmall, {"q", "r", "s", "wo", "y"});
  const auto cs = mut::match_candidates(f.design, f.graph, f.targets, {});
  for (const auto& c : cs) {
    auto r = mut::probe_apply(f.design, c, {});
    auto* e = std::get_if<hdl::EditRecord>(&r);
    if (!e) continue;
    const auto applied = mut::apply_operator(f.design, c, {}, *e);
    const auto sites = hdl::structural_diff({{"m.v", f.design.files[0].ast.get()}}, {{"m.v", &applied.file_ast}});
    INFO(c.describe());
    REQUIRE(sites.size() == 1);
    CHECK(hdl::site_matches(*e, sites[0], *f.design.files[0].ast, applied.file_ast));
  }
}

TEST_CASE("validity names") {
  const mut::MutationConfig cfg;
  CHECK(mut::is_validity_name("in_valid", cfg.validity_patterns));
  CHECK(mut::is_validity_name("wr_en", cfg.validity_patterns));
  CHECK(mut::is_validity_name("tvalid", cfg.validity_patterns));
  CHECK(mut::is_validity_name("GRANT", cfg.validity_patterns));
  CHECK_FALSE(mut::is_validity_name("length", cfg.validity_patterns));
  CHECK_FALSE(mut::is_validity_name("pending", cfg.validity_patterns));
}
