#include "pshosc/parallel.hpp"

namespace pshosc {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_workers = n;
}

unsigned worker_count() { return g_workers; }

}  // namespace pshosc
