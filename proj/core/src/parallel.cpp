#include "prestrain/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace prestrain {

namespace {
// Nested calls run serially so concurrent runs do not multiply threads.
thread_local bool inside_worker = false;
}  // namespace

int thread_count() {
  if (const char* env = std::getenv("PRESTRAIN_LAB_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1) return requested;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), chunks);
  if (workers <= 1 || inside_worker) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }

  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    const bool outer = inside_worker;
    inside_worker = true;
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        body(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
    inside_worker = outer;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace prestrain
