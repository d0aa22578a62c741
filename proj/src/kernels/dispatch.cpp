#include "lindex/kernels/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lindex::kernels {

const KernelTable& avx2_table(); // kernels_avx2.cpp

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
const KernelTable* g_active = nullptr;

const KernelTable* detect() {
    return avx2_available() ? &avx2_table() : &scalar_table();
}
} // namespace

const KernelTable& active() {
    if (!g_active) g_active = detect();
    return *g_active;
}

const KernelTable& force_scalar(bool on) {
    g_active = on ? &scalar_table() : detect();
    return *g_active;
}

namespace {
int g_threads = 0;

int initial_threads() {
    if (const char* env = std::getenv("LINDEX_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}
} // namespace

int thread_count() {
    if (g_threads == 0) g_threads = initial_threads();
    return g_threads;
}

void set_thread_count(int n) { g_threads = std::max(1, n); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
    const std::size_t total = end > begin ? end - begin : 0;
    const int nt = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), std::max<std::size_t>(1, total));
    if (nt <= 1 || total < 2) {
        if (total) chunk(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t step = (total + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
    for (int i = 0; i < nt; ++i) {
        const std::size_t lo = begin + static_cast<std::size_t>(i) * step;
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + step);
        pool.emplace_back(chunk, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace lindex::kernels
