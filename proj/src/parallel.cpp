#include "wavetrace/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace wavetrace {

namespace {
std::atomic<int> g_limit{0};
}

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("WAVETRACE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<int>(n, static_cast<int>(v));
  }
  if (const int lim = g_limit.load(); lim > 0) n = std::min(n, lim);
  return std::max(n, 1);
}

void set_worker_limit(int limit) { g_limit.store(std::max(limit, 0)); }

}  // namespace wavetrace
