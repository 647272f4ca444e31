#include "rtlmut/hdl/literal.hpp"

#include <cctype>

namespace rtlmut::hdl {

namespace {

int bits_per_digit(char base) {
  switch (std::tolower(static_cast<unsigned char>(base))) {
    case 'b': return 1;
    case 'o': return 3;
    case 'h': return 4;
    default: return 0;
  }
}

std::uint64_t width_mask(std::uint32_t width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

}  // namespace

std::optional<Literal> parse_literal(std::string_view text) {
  Literal lit;
  const auto tick = text.find('\'');
  std::string size_digits;
  std::string_view body = text;
  if (tick != std::string_view::npos) {
    for (char c : text.substr(0, tick)) {
      if (c == '_') continue;
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      size_digits += c;
    }
    if (!size_digits.empty()) {
      lit.sized = true;
      if (size_digits.size() > 3) return std::nullopt;
      lit.width = static_cast<std::uint32_t>(std::stoul(size_digits));
      if (lit.width == 0 || lit.width > 64) return std::nullopt;
    }
    std::size_t p = tick + 1;
    if (p < text.size() && (text[p] == 's' || text[p] == 'S')) {
      lit.is_signed = true;
      ++p;
    }
    if (p >= text.size()) return std::nullopt;
    lit.base = text[p++];
    body = text.substr(p);
  } else {
    lit.base = 0;
  }

  const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(lit.base)));
  if (base == 0 || base == 'd') {
    std::uint64_t v = 0;
    for (char c : body) {
      if (c == '_') continue;
      if (base == 'd' && (c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?')) {
        if (body.size() != 1) return std::nullopt;
        lit.x_mask = (c == 'x' || c == 'X') ? width_mask(lit.width) : 0;
        lit.z_mask = (c == 'x' || c == 'X') ? 0 : width_mask(lit.width);
        lit.digit_count = 1;
        return lit;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
      if (v > (~0ULL - digit) / 10) return std::nullopt;
      v = v * 10 + digit;
      ++lit.digit_count;
    }
    if (lit.digit_count == 0) return std::nullopt;
    if (!lit.sized && v > 0xFFFFFFFFULL) {
      // Unsized decimals wider than 32 bits take their natural width.
      std::uint32_t w = 0;
      for (std::uint64_t t = v; t; t >>= 1) ++w;
      lit.width = w;
    }
    lit.value = v & width_mask(lit.width);
    return lit;
  }

  const int bpd = bits_per_digit(base);
  if (bpd == 0) return std::nullopt;
  std::uint64_t v = 0, xm = 0, zm = 0;
  const std::uint64_t digit_mask = (1ULL << bpd) - 1;
  for (char c : body) {
    if (c == '_') continue;
    std::uint64_t d = 0, dx = 0, dz = 0;
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lc == 'x') {
      dx = digit_mask;
    } else if (lc == 'z' || lc == '?') {
      dz = digit_mask;
    } else if (std::isxdigit(static_cast<unsigned char>(c))) {
      d = static_cast<std::uint64_t>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : lc - 'a' + 10);
      if (d > digit_mask) return std::nullopt;
      if (std::isupper(static_cast<unsigned char>(c))) lit.uppercase_digits = true;
    } else {
      return std::nullopt;
    }
    if (((v | xm | zm) >> (64 - bpd)) != 0) return std::nullopt;
    v = (v << bpd) | d;
    xm = (xm << bpd) | dx;
    zm = (zm << bpd) | dz;
    ++lit.digit_count;
  }
  if (lit.digit_count == 0) return std::nullopt;
  const auto m = width_mask(lit.width);
  lit.value = v & m;
  lit.x_mask = xm & m;
  lit.z_mask = zm & m;
  return lit;
}

std::string format_literal(const Literal& style, std::uint64_t value) {
  value &= style.mask();
  const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(style.base)));
  if (base == 0) return std::to_string(value);

  std::string prefix = style.sized ? std::to_string(style.width) : std::string();
  prefix += '\'';
  if (style.is_signed) prefix += 's';
  prefix += style.base;

  if (base == 'd') return prefix + std::to_string(value);

  const int bpd = bits_per_digit(base);
  std::string digits;
  std::uint64_t v = value;
  const char* table = style.uppercase_digits ? "0123456789ABCDEF" : "0123456789abcdef";
  do {
    digits.insert(digits.begin(), table[v & ((1ULL << bpd) - 1)]);
    v >>= bpd;
  } while (v != 0);
  while (digits.size() < style.digit_count) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

std::optional<std::string> perturb_literal(std::string_view text, std::int64_t delta) {
  auto lit = parse_literal(text);
  if (!lit || lit->has_unknown()) return std::nullopt;
  const std::uint64_t next = (lit->value + static_cast<std::uint64_t>(delta)) & lit->mask();
  return format_literal(*lit, next);
}

}  // namespace rtlmut::hdl
