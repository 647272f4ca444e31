#include "rtlmut/util/hash.hpp"

#include <cstdio>

namespace rtlmut::util {

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

std::uint64_t SplitMix::next() {
  const std::uint64_t out = splitmix64(state_);
  state_ += 0x9e3779b97f4a7c15ULL;
  return out;
}

std::uint64_t SplitMix::below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

}  // namespace rtlmut::util
