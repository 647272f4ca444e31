#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rtlmut::util {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write
/// results into slot i, so output order never depends on scheduling. The
/// first exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n == 0 ? 1 : n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::size_t err_index = n;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

unsigned default_workers();

}  // namespace rtlmut::util
