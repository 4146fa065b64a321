#include "amicus/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amicus {

namespace {
// 0 means "not set, use the runtime default".
int g_max_threads = 0;
}  // namespace

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) { g_max_threads = n > 0 ? n : 0; }

}  // namespace amicus
