#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qprobe {

inline std::vector<double> linspace(double a, double b, int n)
{
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = a + step * i;
    out[n - 1] = b;
    return out;
}

// Trapezoidal integral of a sampled curve.
inline double trapezoid(const std::vector<double>& times, const std::vector<double>& values)
{
    if (times.size() != values.size())
        throw std::invalid_argument("trapezoid: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    return acc;
}

// Cumulative trapezoid; out[i] = integral over [t0, t_i], out[0] = 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                                const std::vector<double>& values)
{
    if (times.size() != values.size())
        throw std::invalid_argument("cumulative_trapezoid: size mismatch");
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    return out;
}

// Runs fn(i) for i in [0, n). With threads != 1 the index range is split into
// round-robin strides, so each index is always processed by the same worker
// regardless of timing; results must be written to per-index slots.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min<std::size_t>(threads, n > 0 ? n : 1);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < n; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qprobe
