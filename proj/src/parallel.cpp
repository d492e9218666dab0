#include "dirmatch/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

namespace dirmatch {

namespace {
std::atomic<int> g_thread_cap{0};

int effective_threads(std::size_t work) {
  int cap = g_thread_cap.load();
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int t = cap > 0 ? std::min(cap, hw) : hw;
  return int(std::min<std::size_t>(std::size_t(t), std::max<std::size_t>(work, 1)));
}
}  // namespace

void set_thread_cap(int threads) { g_thread_cap.store(threads < 0 ? 0 : threads); }

int thread_cap() { return g_thread_cap.load(); }

void parallel_for_chunked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
  if (end <= begin) return;
  std::size_t work = end - begin;
  int nt = effective_threads(work);
  if (nt <= 1) {
    fn(begin, end);
    return;
  }
  std::size_t chunk = (work + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = begin + chunk * std::size_t(t);
    std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  parallel_for_chunked(begin, end, [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace dirmatch
