#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rtlmut::util {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key/value pairs, one `key = value` per line. Keys may repeat.
/// Values are escaped so that newlines, tabs and backslashes round-trip.
struct KvBlock {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value);
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  std::vector<std::string> all(const std::string& key) const;
};

std::string escape_value(const std::string& raw);
std::string unescape_value(const std::string& escaped);

/// Writes blocks separated by `[name]` headers. An empty name emits no header.
std::string format_kv(const std::vector<std::pair<std::string, KvBlock>>& blocks);
/// Parses text produced by format_kv. `#` starts a comment line.
std::vector<std::pair<std::string, KvBlock>> parse_kv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Non-empty trimmed lines with `#` comments removed.
std::vector<std::string> read_list(const std::filesystem::path& path);

std::string format_fixed(double value, int digits = 4);

}  // namespace rtlmut::util
