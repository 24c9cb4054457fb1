#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scalesep {

// Global switch between the OpenMP kernels and the serial reference
// implementations. Tests flip it to compare both paths; the CLI sets the
// thread count from --jobs (jobs=1 runs the serial path so output is
// byte-reproducible).

bool parallel_enabled();
void set_parallel_enabled(bool on);
void set_thread_count(int jobs);
int thread_count();

}  // namespace scalesep
