#include "digeo/config.hpp"

#include <atomic>

namespace digeo {

const Tolerances& tols() {
  static const Tolerances t{};
  return t;
}

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

}  // namespace digeo
