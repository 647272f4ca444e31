#include "rtlmut/util/parallel.hpp"

namespace rtlmut::util {

unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

}  // namespace rtlmut::util
