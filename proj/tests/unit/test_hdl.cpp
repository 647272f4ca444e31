#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "rtlmut/elab/design.hpp"
#include "rtlmut/hdl/emit.hpp"
#include "rtlmut/hdl/parser.hpp"
#include "rtlmut/hdl/transform.hpp"
#include "rtlmut/util/hash.hpp"
#include "rtlmut/util/kv.hpp"

using namespace rtlmut;
using namespace rtlmut::hdl;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(RTLMUT_CORPUS_DIR)) {
    if (e.path().extension() == ".v") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string random_expr(util::SplitMix& rng, int depth) {
  static const char* leaves[] = {"a", "b", "c[3]", "c[5:2]", "8'hff", "4'b1010", "3", "d"};
  static const char* binops[] = {"+", "-", "*", "&", "|", "^", "<<", ">>", "==", "!=", "<", ">=", "&&", "||"};
  static const char* unops[] = {"~", "!", "-", "&", "|", "^"};
  if (depth == 0) return leaves[rng.below(8)];
  switch (rng.below(5)) {
    case 0:
      return std::string(unops[rng.below(6)]) + "(" + random_expr(rng, depth - 1) + ")";
    case 1:
      return "(" + random_expr(rng, depth - 1) + " ? " + random_expr(rng, depth - 1) + " : " +
             random_expr(rng, depth - 1) + ")";
    case 2:
      return "{" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + "}";
    default:
      return random_expr(rng, depth - 1) + " " + binops[rng.below(14)] + " " + random_expr(rng, depth - 1);
  }
}

}  // namespace

TEST_CASE("minimal module round-trips through the emitter") {
  const char* text = R"(
module m #(parameter W = 8) (input clk, input [W-1:0] a, output reg [W-1:0] q);
  reg [7:0] mem [0:15];
  wire x = a[0];
  always @(posedge clk) begin
    if (a[1]) q <= a + 1; else if (x) q <= {a[3:0], a[7:4]}; else q <= 0;
    case (a[1:0])
      2'd0, 2'd1: q <= ~&a;
      default: ;
    endcase
  end
endmodule
)";
  Node ast = parse_text("m.v", text);
  REQUIRE(ast.kind == NodeKind::SourceText);
  REQUIRE(ast.children.size() == 1);
  CHECK(ast.child(0).kind == NodeKind::Module);
  const std::string out = emit(ast);
  Node again = parse_text("m.v", out);
  CHECK(structurally_equal(ast, again));
  CHECK(emit(again) == out);
}

TEST_CASE("constructs outside the subset are rejected") {
  CHECK_THROWS_AS(parse_text("g.v", "module m(input a); genvar i; endmodule"), UnsupportedConstruct);
  CHECK_THROWS_AS(parse_text("g.v", R"(module m(input a, output y);
  generate
    assign y = a;
  endgenerate
endmodule)"),
                  UnsupportedConstruct);
  CHECK_THROWS_AS(parse_text("f.v", R"(module m(input a, output reg y);
  integer i;
  always @(*) for (i = 0; i < 2; i = i + 1) y = a;
endmodule)"),
                  UnsupportedConstruct);
  try {
    parse_text("s.v", "module m(input a, output y);\n  assign y = a +;\nendmodule\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.file() == "s.v");
  }
}

TEST_CASE("corpus files round-trip and diff to nothing against themselves") {
  const auto files = corpus_files();
  REQUIRE(files.size() >= 12);
  for (const auto& f : files) {
    INFO(f.string());
    const Node ast = parse_text(f.filename().string(), util::read_file(f));
    const std::string out = emit(ast);
    const Node again = parse_text(f.filename().string(), out);
    CHECK(structurally_equal(ast, again));
    CHECK(emit(again) == out);
    CHECK(structural_diff(ast, ast).empty());
    CHECK(structural_diff(ast, again).empty());
  }
}

TEST_CASE("random expressions survive emit and reparse") {
  util::SplitMix rng(42);
  for (int i = 0; i < 500; ++i) {
    const std::string text = random_expr(rng, 1 + static_cast<int>(rng.below(4)));
    INFO(text);
    const Node e = parse_expression_text(text);
    const Node back = parse_expression_text(emit_expression(e));
    CHECK(structurally_equal(e, back));
  }
}

TEST_CASE("sanitize folds a lowered initializer back into the declaration") {
  const Node lowered = parse_text("r.v", R"(module m(output [3:0] y);
  reg [3:0] r;
  assign r = 4'd0;
  assign y = r;
endmodule)");
  const Node folded = parse_text("r.v", R"(module m(output [3:0] y);
  reg [3:0] r = 4'd0;
  assign y = r;
endmodule)");
  CHECK(structurally_equal(sanitize(lowered), folded));
  CHECK(structurally_equal(sanitize(folded), folded));
  const Node wire_assign = parse_text("w.v", "module m(output y); wire w; assign w = 1'b1; assign y = w; endmodule");
  CHECK(structurally_equal(sanitize(wire_assign), wire_assign));
}

TEST_CASE("diff reports one site per change and one site for a swap") {
  const Node a = parse_text("d.v", "module m(input a, input b, output y, output z); assign y = a & b; assign z = a | b; endmodule");
  const Node one = parse_text("d.v", "module m(input a, input b, output y, output z); assign y = a ^ b; assign z = a | b; endmodule");
  const Node two = parse_text("d.v", "module m(input a, input b, output y, output z); assign y = a ^ b; assign z = a & b; endmodule");
  const Node swap = parse_text("d.v", "module m(input a, input b, output y, output z); assign y = b & a; assign z = a | b; endmodule");
  CHECK(structural_diff(a, one).size() == 1);
  CHECK(structural_diff(a, two).size() == 2);
  const auto s = structural_diff(a, swap);
  REQUIRE(s.size() == 1);
  CHECK(s[0].kind == EditKind::Replace);
  const Node ins = parse_text("d.v", "module m(input a, input b, output y, output z); assign y = a & b; assign y = a & b; assign z = a | b; endmodule");
  const auto si = structural_diff(a, ins);
  REQUIRE(si.size() == 1);
  CHECK(si[0].kind == EditKind::Insert);
}

TEST_CASE("node paths round-trip as text") {
  const NodePath p{0, 3, 12, 1};
  CHECK(path_from_string(path_to_string(p)) == p);
  CHECK(is_prefix(NodePath{0, 3}, p));
  CHECK_FALSE(is_prefix(NodePath{0, 4}, p));
}

TEST_CASE("elaboration binds parameters and counts lines") {
  const auto d = elab::elaborate({elab::make_design_file("a.v", R"(module leaf #(parameter W = 2) (input [W-1:0] i, output [W-1:0] o);
  assign o = ~i;
endmodule

module top(input [5:0] x, output [5:0] y);
  leaf #(.W(6)) u (.i(x), .o(y));
endmodule
)")},
                                 "");
  CHECK(d.top == "top");
  REQUIRE(d.instances.size() == 2);
  CHECK(d.instances[1].path == "u");
  CHECK(d.instances[1].signals.at("i").width() == 6);
  CHECK(d.loc == 6);
}

TEST_CASE("elaboration failures") {
  CHECK_THROWS_AS(elab::elaborate({elab::make_design_file("u.v", "module top(input a); nothere u (.a(a)); endmodule")}, "top"),
                  elab::UnresolvedModule);
  CHECK_THROWS_AS(elab::elaborate({elab::make_design_file("c.v", R"(module p(input a); q u (.a(a)); endmodule
module q(input a); p u (.a(a)); endmodule)")},
                                  "p"),
                  elab::CyclicHierarchy);
  CHECK_THROWS_AS(elab::elaborate({elab::make_design_file("t.v", "module a(input x); endmodule\nmodule b(input x); endmodule")}, ""),
                  elab::MultipleTopCandidates);
  CHECK_THROWS_AS(elab::elaborate(elab::load_design_files(std::string(RTLMUT_FIXTURE_DIR) + "/unresolved"), "unresolved_top"),
                  elab::UnresolvedModule);
}

TEST_CASE("corpus designs elaborate within the size band") {
  for (const char* name : {"sync_fifo", "alu_pipe", "traffic_ctrl", "rr_arbiter"}) {
    INFO(name);
    const auto files = elab::load_design_files(fs::path(RTLMUT_CORPUS_DIR) / name / "rtl");
    const auto d = elab::elaborate(files, "");
    CHECK(d.loc >= 200);
    CHECK(d.loc <= 600);
    CHECK(d.instances.size() >= 3);
  }
}
