#pragma once

// Minimal deterministic parallel loop. Work items are indexed; each worker
// owns a contiguous stripe and writes results keyed by index, so the output
// is identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace degradex {

inline std::size_t& thread_count_ref() {
    static std::size_t n = 0;  // 0 = use hardware_concurrency
    return n;
}

inline void set_thread_count(std::size_t n) { thread_count_ref() = n; }

inline std::size_t effective_thread_count() {
    std::size_t n = thread_count_ref();
    if (n == 0) n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    return n;
}

// Runs fn(i) for i in [0, n). fn must only write state keyed by i.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    std::size_t workers = std::min(effective_thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Pairwise (cascade) summation: bit-stable regardless of how the terms were
// produced, and more accurate than naive left-to-right accumulation.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = data[0];
        for (std::size_t i = 1; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

}  // namespace degradex
