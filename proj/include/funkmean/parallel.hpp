#pragma once

namespace funkmean {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// bit-identical results; the serial path exists for testing and benchmarks.
enum class Execution { serial, parallel };

/// Worker cap from FUNKMEAN_THREADS (0 or unset = OpenMP default).
int configured_threads();

/// Applies configured_threads() to the OpenMP runtime. Safe to call repeatedly.
void apply_thread_limit();

}  // namespace funkmean
