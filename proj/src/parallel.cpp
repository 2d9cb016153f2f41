#include "expbasis/parallel.hpp"

#include <atomic>

namespace expbasis {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads.store(threads < 1 ? 1 : threads); }

int thread_count() { return g_threads.load(); }

}  // namespace expbasis
