#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace truthrl::detail {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is claimed in
// index order; the first exception (lowest index) is rethrown after joining.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    int failed_at = n;
    std::exception_ptr error;
    auto body = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    int t = workers < n ? workers : n;
    for (int w = 1; w < t; ++w) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace truthrl::detail
