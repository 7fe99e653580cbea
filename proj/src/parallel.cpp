#include "dhpdmp/parallel.hpp"

#include <atomic>

namespace dhpdmp {

namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_default_threads(std::size_t n) { g_threads = n; }
std::size_t default_threads() { return g_threads; }

}  // namespace dhpdmp
