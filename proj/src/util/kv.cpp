#include "rtlmut/util/kv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rtlmut::util {

void KvBlock::add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }

std::optional<std::string> KvBlock::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvBlock::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw FormatError("missing key: " + key);
  return *v;
}

std::vector<std::string> KvBlock::all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::string escape_value(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_value(const std::string& escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\' || i + 1 == escaped.size()) {
      out += escaped[i];
      continue;
    }
    switch (escaped[++i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: out += escaped[i];
    }
  }
  return out;
}

std::string format_kv(const std::vector<std::pair<std::string, KvBlock>>& blocks) {
  std::string out;
  bool first = true;
  for (const auto& [name, block] : blocks) {
    if (!first) out += '\n';
    first = false;
    if (!name.empty()) out += "[" + name + "]\n";
    for (const auto& [k, v] : block.entries) out += k + " = " + escape_value(v) + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, KvBlock>> parse_kv(const std::string& text) {
  std::vector<std::pair<std::string, KvBlock>> blocks;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      blocks.emplace_back(t.substr(1, t.size() - 2), KvBlock{});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected key = value");
    if (blocks.empty()) blocks.emplace_back("", KvBlock{});
    // Values keep leading spaces after the single separator space.
    const auto raw = line.find('=');
    std::string value = line.substr(raw + 1);
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    while (!value.empty() && (value.back() == '\r')) value.pop_back();
    blocks.back().second.add(trim(t.substr(0, eq)), unescape_value(value));
  }
  return blocks;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::vector<std::string> read_list(const std::filesystem::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto t = trim(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace rtlmut::util
