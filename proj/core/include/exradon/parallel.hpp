#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace exradon {

/// Worker count: hardware concurrency, overridable via EXRADON_WORKERS.
inline int worker_count(int jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EXRADON_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(1, std::min(n, jobs));
}

/// Static-chunked parallel loop over [0, jobs). Bodies must write to disjoint
/// slots; any reduction happens afterwards in index order, so results do not
/// depend on the execution schedule.
inline void parallel_for(int jobs, const std::function<void(int)>& body) {
  const int workers = worker_count(jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < jobs; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace exradon
