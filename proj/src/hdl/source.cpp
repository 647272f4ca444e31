#include "rtlmut/hdl/source.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rtlmut::hdl {

SourceFile::SourceFile(std::string path, std::string text) : path_(std::move(path)), text_(std::move(text)) {
  line_index_.push_back(0);
  for (std::size_t i = 0; i < text_.size(); ++i) {
    if (text_[i] == '\n' && i + 1 < text_.size()) line_index_.push_back(i + 1);
  }
}

SourceFile SourceFile::load(const std::filesystem::path& path, std::string display_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return SourceFile(display_path.empty() ? path.string() : std::move(display_path), buf.str());
}

std::pair<std::uint32_t, std::uint32_t> SourceFile::position(std::size_t offset) const {
  auto it = std::upper_bound(line_index_.begin(), line_index_.end(), offset);
  const auto line = static_cast<std::size_t>(it - line_index_.begin());
  const auto start = line_index_[line - 1];
  return {static_cast<std::uint32_t>(line), static_cast<std::uint32_t>(offset - start + 1)};
}

std::string_view SourceFile::line_text(std::uint32_t line) const {
  if (line == 0 || line > line_index_.size()) return {};
  const auto start = line_index_[line - 1];
  auto end = line < line_index_.size() ? line_index_[line] : text_.size();
  while (end > start && (text_[end - 1] == '\n' || text_[end - 1] == '\r')) --end;
  return std::string_view(text_).substr(start, end - start);
}

std::size_t SourceFile::non_blank_lines() const {
  std::size_t count = 0;
  for (std::uint32_t l = 1; l <= line_index_.size(); ++l) {
    const auto t = line_text(l);
    if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return !std::isspace(c); })) ++count;
  }
  return count;
}

namespace {
std::string format_location(const std::string& file, std::uint32_t line, std::uint32_t col,
                            const std::string& message) {
  std::ostringstream os;
  os << file << ':' << line << ':' << col << ": " << message;
  return os.str();
}

std::string expected_message(const std::string& found, const std::vector<std::string>& expected) {
  std::string msg = "syntax error near '" + found + "'";
  if (!expected.empty()) {
    msg += ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += "'" + expected[i] + "'";
    }
  }
  return msg;
}
}  // namespace

FrontendError::FrontendError(std::string file, std::uint32_t line, std::uint32_t col, const std::string& message)
    : std::runtime_error(format_location(file, line, col, message)),
      file_(std::move(file)),
      line_(line),
      col_(col),
      message_(message) {}

SyntaxError::SyntaxError(std::string file, std::uint32_t line, std::uint32_t col, std::string found,
                         std::vector<std::string> expected)
    : FrontendError(std::move(file), line, col, expected_message(found, expected)),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

UnsupportedConstruct::UnsupportedConstruct(std::string file, std::uint32_t line, std::uint32_t col,
                                           std::string construct)
    : FrontendError(std::move(file), line, col, "unsupported construct: " + construct),
      construct_(std::move(construct)) {}

}  // namespace rtlmut::hdl
