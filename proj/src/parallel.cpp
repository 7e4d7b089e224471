#include "funkmean/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace funkmean {

int configured_threads() {
  const char* raw = std::getenv("FUNKMEAN_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const int value = std::stoi(raw);
    return value > 0 ? value : 0;
  } catch (...) {
    return 0;
  }
}

void apply_thread_limit() {
#ifdef _OPENMP
  if (const int threads = configured_threads(); threads > 0) omp_set_num_threads(threads);
#endif
}

}  // namespace funkmean
