#include "projlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace projlab {

std::size_t thread_budget() {
    std::size_t budget = 0;
    if (const char* env = std::getenv("PROJLAB_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) budget = static_cast<std::size_t>(parsed);
    }
    if (budget == 0) {
        budget = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return budget;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    const std::size_t workers = std::min(thread_budget(), count);

    if (workers <= 1 || count < 2) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);

    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace projlab
