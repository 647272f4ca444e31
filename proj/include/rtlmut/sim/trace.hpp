#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtlmut/sim/expr.hpp"

namespace rtlmut::sim {

class ShapeMismatch : public SimError {
 public:
  using SimError::SimError;
};

struct TraceSignal {
  std::string name;
  std::uint32_t width = 1;
  std::int64_t msb = 0;
  std::int64_t lsb = 0;
};

/// Per-cycle values of every observed signal, sampled after combinational
/// settle and before the clock edge.
struct Trace {
  std::string design_id;
  std::string stimulus;
  std::vector<TraceSignal> signals;  // sorted by name
  std::vector<std::vector<std::uint64_t>> rows;

  int index(const std::string& name) const;
  std::size_t cycles() const { return rows.size(); }
  std::string to_text() const;
  std::string to_vcd() const;
};

struct TraceDiff {
  std::size_t cycle = 0;
  std::string signal;
  std::uint64_t left = 0;
  std::uint64_t right = 0;
};

/// Earliest differing cycle; ties go to the first signal by name.
std::optional<TraceDiff> diff_traces(const Trace& a, const Trace& b);

}  // namespace rtlmut::sim
