#include "migtk/parallel.hpp"

namespace migtk {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_default_workers(unsigned workers) { g_workers.store(workers); }

unsigned default_workers() {
  const unsigned configured = g_workers.load();
  if (configured != 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace migtk
