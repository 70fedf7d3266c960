#include "spherefold/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spherefold {

namespace {

std::atomic<unsigned>& configured_threads() {
  static std::atomic<unsigned> n{std::max(1U, std::thread::hardware_concurrency())};
  return n;
}

void run_tasks(std::size_t tasks, const std::function<void(std::size_t)>& task) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), tasks));
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) task(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= tasks) return;
      try {
        task(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(tasks, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void set_thread_count(unsigned n) { configured_threads().store(std::max(1U, n)); }

unsigned thread_count() { return configured_threads().load(); }

void parallel_for_chunks(std::size_t n, std::size_t chunk,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(n, chunk);
  run_tasks(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    fn(c, begin, std::min(n, begin + chunk));
  });
}

void parallel_for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn) { run_tasks(n, fn); }

}  // namespace spherefold
