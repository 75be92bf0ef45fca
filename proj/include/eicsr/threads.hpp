#pragma once

namespace eicsr {

/// Worker thread count for the OpenMP kernels. Resolution order:
/// explicit set_worker_threads(), then the EICSR_THREADS environment
/// variable, then the OpenMP default. Always >= 1.
int worker_threads();

/// Override the thread count (0 = back to env/OpenMP default).
void set_worker_threads(int n);

} // namespace eicsr
