#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace iadiff {

/// Runs f(i) for i in [begin, end) across worker threads with a static
/// block partition. Each index must write only to its own slots, so the
/// result is independent of thread count and scheduling; callers keep
/// reductions deterministic by combining the per-index results in index
/// order afterwards.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& f) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > count) workers = count;
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
        const std::size_t lo = begin + t * chunk;
        const std::size_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, t] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace iadiff
