#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace epscope {

/// Evaluates f(0..n-1) on up to `threads` workers. Results are stored by index,
/// so the output order never depends on scheduling.
template <class F>
auto parallel_map(std::size_t n, F&& f, unsigned threads = 1) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < n; i = next++) out[i] = f(i);
            } catch (...) {
                failures[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : failures)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace epscope
