#pragma once

namespace wavetrace {

/// Worker count for the parallel kernels: the OpenMP default, capped by
/// WAVETRACE_THREADS and by set_worker_limit.
int worker_count();

/// Process-wide cap on worker_count(); 0 removes it. Used by benchmarks to run
/// the parallel kernels single-threaded.
void set_worker_limit(int limit);

}  // namespace wavetrace
