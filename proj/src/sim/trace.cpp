#include "rtlmut/sim/trace.hpp"

#include <algorithm>
#include <sstream>

namespace rtlmut::sim {

int Trace::index(const std::string& name) const {
  auto it = std::lower_bound(signals.begin(), signals.end(), name,
                             [](const TraceSignal& s, const std::string& n) { return s.name < n; });
  if (it == signals.end() || it->name != name) return -1;
  return static_cast<int>(it - signals.begin());
}

std::string Trace::to_text() const {
  std::ostringstream os;
  os << "design " << design_id << "\n";
  os << "stimulus " << stimulus << "\n";
  os << "signals";
  for (const auto& s : signals) os << " " << s.name << ":" << s.width;
  os << "\n";
  for (std::size_t c = 0; c < rows.size(); ++c) {
    os << c;
    for (auto v : rows[c]) os << " " << std::hex << v << std::dec;
    os << "\n";
  }
  return os.str();
}

namespace {

std::string vcd_id(std::size_t i) {
  std::string id;
  do {
    id += static_cast<char>('!' + i % 94);
    i /= 94;
  } while (i > 0);
  return id;
}

std::string vcd_value(std::uint64_t v, std::uint32_t width, const std::string& id) {
  if (width == 1) return std::string(1, (v & 1) ? '1' : '0') + id;
  std::string bits;
  for (int b = static_cast<int>(width) - 1; b >= 0; --b) bits += ((v >> b) & 1) ? '1' : '0';
  return "b" + bits + " " + id;
}

}  // namespace

std::string Trace::to_vcd() const {
  std::ostringstream os;
  os << "$timescale 1ns $end\n$scope module " << (design_id.empty() ? "top" : design_id) << " $end\n";
  for (std::size_t i = 0; i < signals.size(); ++i) {
    std::string name = signals[i].name;
    std::replace(name.begin(), name.end(), ' ', '_');
    os << "$var wire " << signals[i].width << " " << vcd_id(i) << " " << name << " $end\n";
  }
  os << "$upscope $end\n$enddefinitions $end\n";
  for (std::size_t c = 0; c < rows.size(); ++c) {
    os << "#" << c * 10 << "\n";
    for (std::size_t i = 0; i < signals.size(); ++i) {
      if (c > 0 && rows[c - 1][i] == rows[c][i]) continue;
      os << vcd_value(rows[c][i], signals[i].width, vcd_id(i)) << "\n";
    }
  }
  os << "#" << rows.size() * 10 << "\n";
  return os.str();
}

std::optional<TraceDiff> diff_traces(const Trace& a, const Trace& b) {
  if (a.rows.size() != b.rows.size() || a.signals.size() != b.signals.size()) {
    throw ShapeMismatch("traces differ in shape: " + std::to_string(a.rows.size()) + "x" +
                        std::to_string(a.signals.size()) + " vs " + std::to_string(b.rows.size()) + "x" +
                        std::to_string(b.signals.size()));
  }
  for (std::size_t i = 0; i < a.signals.size(); ++i) {
    if (a.signals[i].name != b.signals[i].name || a.signals[i].width != b.signals[i].width) {
      throw ShapeMismatch("traces differ in signal set at '" + a.signals[i].name + "'");
    }
  }
  for (std::size_t c = 0; c < a.rows.size(); ++c) {
    for (std::size_t i = 0; i < a.signals.size(); ++i) {
      if (a.rows[c][i] != b.rows[c][i]) return TraceDiff{c, a.signals[i].name, a.rows[c][i], b.rows[c][i]};
    }
  }
  return std::nullopt;
}

}  // namespace rtlmut::sim
