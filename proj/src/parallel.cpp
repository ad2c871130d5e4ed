#include "dphide/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace dphide {

namespace {
int default_threads = 0;
}

void set_thread_count(int threads) {
  if (default_threads == 0) default_threads = omp_get_num_procs();
  omp_set_num_threads(threads > 0 ? threads : default_threads);
}

int thread_count() { return omp_get_max_threads(); }

int threads_from_environment() {
  const char* raw = std::getenv("DPHIDE_THREADS");
  if (raw == nullptr) return 0;
  try {
    std::size_t used = 0;
    const int value = std::stoi(raw, &used);
    return used == std::string(raw).size() && value > 0 ? value : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace dphide
