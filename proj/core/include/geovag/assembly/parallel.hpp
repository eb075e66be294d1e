#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace geovag {

void set_num_threads(int n);
int num_threads();

/// Runs f(i) for i in [begin, end) on contiguous chunks, one per thread.
template <class F>
void parallel_for(int begin, int end, F&& f) {
    const int n = end - begin;
    const int nt = std::min(num_threads(), std::max(n / 64, 1));
    if (nt <= 1) {
        for (int i = begin; i < end; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(nt);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const int lo = begin + static_cast<int>(static_cast<long>(n) * t / nt);
        const int hi = begin + static_cast<int>(static_cast<long>(n) * (t + 1) / nt);
        pool.emplace_back([&, lo, hi, t] {
            try {
                for (int i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace geovag
