#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlmut::hdl {

/// Raw source text plus a line-start index for position lookups.
class SourceFile {
 public:
  SourceFile() = default;
  SourceFile(std::string path, std::string text);

  static SourceFile load(const std::filesystem::path& path, std::string display_path = {});

  const std::string& path() const { return path_; }
  const std::string& text() const { return text_; }
  const std::vector<std::size_t>& line_index() const { return line_index_; }

  std::size_t line_count() const { return line_index_.size(); }
  /// 1-based line and column of a byte offset.
  std::pair<std::uint32_t, std::uint32_t> position(std::size_t offset) const;
  std::string_view line_text(std::uint32_t line) const;
  /// Lines containing at least one non-whitespace character.
  std::size_t non_blank_lines() const;

 private:
  std::string path_;
  std::string text_;
  std::vector<std::size_t> line_index_;
};

/// Base for all diagnostics raised by the frontend.
class FrontendError : public std::runtime_error {
 public:
  FrontendError(std::string file, std::uint32_t line, std::uint32_t col, const std::string& message);

  const std::string& file() const { return file_; }
  std::uint32_t line() const { return line_; }
  std::uint32_t col() const { return col_; }
  const std::string& message() const { return message_; }

 private:
  std::string file_;
  std::uint32_t line_;
  std::uint32_t col_;
  std::string message_;
};

class SyntaxError : public FrontendError {
 public:
  SyntaxError(std::string file, std::uint32_t line, std::uint32_t col, std::string found,
              std::vector<std::string> expected);

  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::string found_;
  std::vector<std::string> expected_;
};

/// A recognized construct that lies outside the supported Verilog subset.
class UnsupportedConstruct : public FrontendError {
 public:
  UnsupportedConstruct(std::string file, std::uint32_t line, std::uint32_t col, std::string construct);

  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

}  // namespace rtlmut::hdl
