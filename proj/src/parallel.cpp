#include "shadowlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace shadowlab {

unsigned worker_count() {
  if (const char* env = std::getenv("SHADOWLAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace shadowlab
