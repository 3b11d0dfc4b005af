#ifndef SEMIGARCH_PARALLEL_HPP
#define SEMIGARCH_PARALLEL_HPP

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace semigarch {

/// Static partition of replicate indices over worker threads.  Each index is
/// processed exactly once and results must be written to per-index slots, so
/// the merged output is independent of the worker count.
inline void parallel_replicates(long count, int workers,
                                const std::function<void(long)>& body) {
    if (count <= 0) return;
    const int w = static_cast<int>(std::max<long>(1, std::min<long>(workers, count)));
    if (w == 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        const long lo = count * t / w;
        const long hi = count * (t + 1) / w;
        threads.emplace_back([&, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace semigarch

#endif
