#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nipaths {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write into
// slot i only, so results do not depend on the thread count. The first
// exception thrown by any task is rethrown.
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn)
{
    const size_t workers = std::min(n, static_cast<size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

// Pairwise summation; deterministic for a fixed input order.
inline double pairwise_sum(const double* v, size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            s += v[i];
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace nipaths
