#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kernsel {

// Runs fn(0..jobs-1) on up to `workers` threads. Callers must make jobs
// independent and write results by index; the outcome is then invariant to
// the worker count. The first exception thrown by a job is rethrown here.
inline void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
    if (jobs <= 0) return;
    if (workers <= 1 || jobs == 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= jobs || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    int nthreads = std::min(workers, jobs);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

// Worker-count default: KERNSEL_WORKERS env var, else hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("KERNSEL_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

} // namespace kernsel
