#include "mgfit/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mgfit {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(nthreads);
  for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  pool.clear();  // join

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mgfit
