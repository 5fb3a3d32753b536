// ensemble.hpp: deterministic parallel map over ensemble members.
//
// Member i is always computed from (master seed, i) and results are reduced
// in index order, so output does not depend on the worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace geophase {

// Worker count from GEOPHASE_WORKERS, falling back to the hardware count.
inline unsigned default_workers() {
    if (const char* env = std::getenv("GEOPHASE_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, unsigned workers, F&& f) {
    std::vector<R> out(n);
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

struct SampleSummary {
    double mean{0.0};
    double std_error{0.0};  // sample standard deviation / sqrt(n)
    std::size_t n{0};
};

inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    // shifted by the first sample so that identical samples give exactly zero spread
    const double x0 = xs.front();
    double sum = 0.0;
    for (double x : xs) sum += x - x0;
    const double shift = sum / static_cast<double>(s.n);
    s.mean = x0 + shift;
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - x0 - shift) * (x - x0 - shift);
    s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
    return s;
}

}  // namespace geophase
