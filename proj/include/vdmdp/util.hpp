#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vdmdp {

/// Number of worker threads requested through the environment (VDMDP_THREADS);
/// defaults to 1 (serial). Results must be identical either way, so this is a
/// throughput knob only.
inline int env_thread_count() {
    if (const char* s = std::getenv("VDMDP_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1) return n;
    }
    return 1;
}

/// Runs fn(i) for i in [0, count). Work items must be independent; each writes
/// only its own slot, so parallel execution is bit-identical to serial. The
/// lowest-index exception wins, for deterministic failure reporting.
template <typename Fn>
void parallel_for_indices(int count, int threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

} // namespace vdmdp
