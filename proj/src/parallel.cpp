#include "crflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace crflow {

int thread_count() {
  static const int n = [] {
    if (const char* env = std::getenv("CRFLOW_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return std::min(v, 256);
    }
    return 1;
  }();
  return n;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  const int workers = thread_count();
  if (workers <= 1 || count < 2048) {
    fn(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace crflow
