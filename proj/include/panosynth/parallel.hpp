#pragma once

namespace panosynth {

/// Number of OpenMP threads used by the parallel kernels. Results never
/// depend on this value.
void set_thread_count(int n);
int thread_count();

}  // namespace panosynth
