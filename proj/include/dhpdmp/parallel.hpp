#ifndef DHPDMP_PARALLEL_HPP
#define DHPDMP_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dhpdmp {

/// Process-wide worker count used by ensemble runners (0 = hardware).
void set_default_threads(std::size_t n);
std::size_t default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own output slot; callers reduce in index order afterwards,
/// so results are independent of the thread count.
template <typename F>
void parallel_for(std::size_t n, F&& fn, std::size_t threads = default_threads()) {
  if (threads == 0) threads = std::max<unsigned>(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dhpdmp

#endif  // DHPDMP_PARALLEL_HPP
