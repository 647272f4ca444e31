#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rtlmut::hdl {

/// Decoded integer literal. Values wider than 64 bits are rejected.
struct Literal {
  bool sized = false;
  std::uint32_t width = 32;  // 32 for unsized literals
  bool is_signed = false;
  char base = 0;             // 0 for a plain decimal, else b/o/d/h as written
  std::uint64_t value = 0;   // x/z digits contribute zero bits
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;  // includes '?' digits
  std::size_t digit_count = 0;
  bool uppercase_digits = false;

  bool has_unknown() const { return (x_mask | z_mask) != 0; }
  std::uint64_t mask() const { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }
};

std::optional<Literal> parse_literal(std::string_view text);

/// Re-renders `value` (truncated to the literal's width) in the literal's
/// original style: same size prefix, base letter, and zero padding.
std::string format_literal(const Literal& style, std::uint64_t value);

/// Adds `delta` modulo 2^width. Returns nullopt for literals with x/z digits.
std::optional<std::string> perturb_literal(std::string_view text, std::int64_t delta);

}  // namespace rtlmut::hdl
