#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rtlmut::util {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = kFnvOffset);
std::string hex64(std::uint64_t value);

std::uint64_t splitmix64(std::uint64_t x);

/// Stateless counter-based generator: one 64-bit word per key tuple.
std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Small seeded generator for shuffles and test fixtures.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }
  result_type operator()() { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace rtlmut::util
