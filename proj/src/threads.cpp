#include "eicsr/threads.hpp"

#include <omp.h>

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace eicsr {

namespace {
std::atomic<int> g_threads{0}; // 0 = unset, resolve from env / OpenMP
} // namespace

void set_worker_threads(int n) { g_threads.store(n > 0 ? n : 0); }

int worker_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    if (const char* env = std::getenv("EICSR_THREADS")) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc() && v > 0) return v;
    }
    n = omp_get_max_threads();
    return n > 0 ? n : 1;
}

} // namespace eicsr
