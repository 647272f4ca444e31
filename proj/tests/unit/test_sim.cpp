#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rtlmut/elab/design.hpp"
#include "rtlmut/sim/simulator.hpp"

using namespace rtlmut;

namespace {

elab::Design design_of(const std::string& text, const std::string& top = {}) {
  return elab::elaborate({elab::make_design_file("d.v", text)}, top, "t");
}

elab::Design fixture(const std::string& name) {
  return elab::elaborate(elab::load_design_files(std::string(RTLMUT_FIXTURE_DIR) + "/" + name), name, name);
}

}  // namespace

TEST_CASE("adder8 matches arithmetic on all input pairs") {
  const auto model = sim::Model::compile(fixture("adder8"));
  sim::Simulator s(model);
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      s.apply_inputs({a, b});
      s.settle();
      const auto total = a + b;
      REQUIRE(s.value("sum") == (total & 0xff));
      REQUIRE(s.value("cout") == (total >> 8));
    }
  }
}

TEST_CASE("counter4 follows closed form after reset") {
  const auto model = sim::Model::compile(fixture("counter4"));
  const auto t = sim::simulate(model, sim::Stimulus::random(7, 4, 24));
  const int idx = t.index("count");
  REQUIRE(idx >= 0);
  for (std::size_t k = 0; k < 20; ++k) CHECK(t.rows[4 + k][idx] == k % 16);
}

TEST_CASE("exhaustive stimulus packs the first input into low bits") {
  const auto model = sim::Model::compile(design_of(
      "module m(input [1:0] a, input b, output [2:0] y); assign y = {b, a}; endmodule"));
  const auto stim = sim::Stimulus::exhaustive(model, 0);
  REQUIRE(stim.cycles == 8);
  const auto t = sim::simulate(model, stim);
  for (std::size_t c = 0; c < 8; ++c) CHECK(t.rows[c][t.index("y")] == c);
}

TEST_CASE("nonblocking swap and blocking chain") {
  const auto model = sim::Model::compile(design_of(R"(
module m(input clk, input rst, output reg [3:0] a, output reg [3:0] b, output reg [3:0] c);
  reg [3:0] t;
  always @(posedge clk) begin
    if (rst) begin
      a <= 4'd1;
      b <= 4'd2;
    end else begin
      a <= b;
      b <= a;
    end
  end
  always @(posedge clk) begin
    t = a + 4'd1;
    c <= t;
  end
endmodule)"));
  const auto t = sim::simulate(model, sim::Stimulus::random(1, 1, 4));
  const int a = t.index("a"), b = t.index("b"), c = t.index("c");
  CHECK(t.rows[1][a] == 1);
  CHECK(t.rows[1][b] == 2);
  CHECK(t.rows[2][a] == 2);
  CHECK(t.rows[2][b] == 1);
  CHECK(t.rows[2][c] == 2);
}

TEST_CASE("part-select and array writes") {
  const auto model = sim::Model::compile(design_of(R"(
module m(input clk, input [1:0] i, input [3:0] d, output [7:0] q, output [3:0] r);
  reg [7:0] w;
  reg [3:0] mem [0:3];
  always @(*) begin
    w = 8'h00;
    w[7:4] = d;
    w[i] = 1'b1;
  end
  always @(posedge clk) mem[i] <= d;
  assign q = w;
  assign r = mem[2];
endmodule)"));
  sim::Simulator s(model);
  s.apply_inputs({0, 2, 0xa});
  s.settle();
  CHECK(s.value("q") == 0xa4);
  s.clock_edge();
  s.settle();
  CHECK(s.value("r") == 0xa);
  CHECK(s.value("mem[2]") == 0xa);
}

TEST_CASE("case with default and casez") {
  const auto model = sim::Model::compile(design_of(R"(
module m(input [2:0] s, output reg [1:0] y, output reg z);
  always @* begin
    case (s)
      3'd0: y = 2'd1;
      default: y = 2'd3;
      3'd1, 3'd2: y = 2'd2;
    endcase
    casez (s)
      3'b1??: z = 1'b1;
      default: z = 1'b0;
    endcase
  end
endmodule)"));
  sim::Simulator s(model);
  const unsigned expect_y[] = {1, 2, 2, 3, 3, 3, 3, 3};
  for (unsigned v = 0; v < 8; ++v) {
    s.apply_inputs({v});
    s.settle();
    CHECK(s.value("y") == expect_y[v]);
    CHECK(s.value("z") == (v >> 2));
  }
}

TEST_CASE("combinational loop is reported") {
  const auto d = design_of("module m(input a, output y); wire p, q; assign p = q & a; assign q = p; assign y = q; endmodule");
  CHECK_THROWS_AS(sim::Model::compile(d), sim::CombinationalLoop);
}

TEST_CASE("shared carry vector is not a loop") {
  CHECK_NOTHROW(sim::Model::compile(fixture("adder8")));
}

TEST_CASE("division by zero reads zero") {
  const auto model = sim::Model::compile(design_of(
      "module m(input [3:0] a, input [3:0] b, output [3:0] q, output [3:0] r); assign q = a / b; assign r = a % b; endmodule"));
  sim::Simulator s(model);
  s.apply_inputs({9, 0});
  s.settle();
  CHECK(s.value("q") == 0);
  CHECK(s.value("r") == 0);
}

TEST_CASE("traces are identical across runs and worker counts") {
  const auto model = sim::Model::compile(fixture("counter4"));
  std::vector<sim::Stimulus> stims;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) stims.push_back(sim::Stimulus::random(seed, 4, 64));
  const auto one = sim::simulate_all(model, stims, 1);
  for (unsigned w : {1u, 4u, 8u}) {
    const auto other = sim::simulate_all(model, stims, w);
    for (std::size_t i = 0; i < stims.size(); ++i) CHECK(one[i].to_text() == other[i].to_text());
  }
}

TEST_CASE("stimulus descriptors round-trip") {
  const auto s = sim::Stimulus::random(99, 3, 40);
  CHECK(sim::Stimulus::parse(s.describe()).describe() == s.describe());
  const sim::Witness w{s.describe(), 12, "u0.q"};
  const auto p = sim::Witness::parse(w.to_string());
  CHECK(p.stimulus == w.stimulus);
  CHECK(p.cycle == 12);
  CHECK(p.signal == "u0.q");
}

TEST_CASE("equivalence verdicts on combinational designs") {
  const auto g = sim::Model::compile(design_of("module m(input [3:0] a, input [3:0] b, output [3:0] y); assign y = a & b; endmodule"));
  const auto same = sim::Model::compile(design_of("module m(input [3:0] a, input [3:0] b, output [3:0] y); assign y = b & a; endmodule"));
  const auto diff = sim::Model::compile(design_of("module m(input [3:0] a, input [3:0] b, output [3:0] y); assign y = a | b; endmodule"));
  CHECK(sim::check_equivalence(g, same, {}).verdict == sim::Equivalence::Equivalent);
  const auto r = sim::check_equivalence(g, diff, {});
  REQUIRE(r.verdict == sim::Equivalence::Distinguished);
  CHECK(r.witness->signal == "y");
  CHECK(sim::replay_witness(g, diff, *r.witness));
}

TEST_CASE("trace diff reports earliest cycle then first signal") {
  sim::Trace a;
  a.signals = {{"a", 1}, {"b", 1}};
  a.rows = {{0, 0}, {0, 1}, {1, 1}};
  sim::Trace b = a;
  b.rows[2][0] = 0;
  b.rows[1][1] = 0;
  const auto d = sim::diff_traces(a, b);
  REQUIRE(d);
  CHECK(d->cycle == 1);
  CHECK(d->signal == "b");
  b.rows.pop_back();
  CHECK_THROWS_AS(sim::diff_traces(a, b), sim::ShapeMismatch);
}
