#include "doubletscope/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace doubletscope {

std::size_t worker_count()
{
    std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
    const char* env = std::getenv("DOUBLETSCOPE_THREADS");
    if (env == nullptr || *env == '\0')
        return hw;
    char* end = nullptr;
    const long requested = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || requested < 0)
        return hw;
    return requested == 0 ? hw : static_cast<std::size_t>(requested);
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t count = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
    if (count <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(count);
        for (std::size_t t = 0; t < count; ++t)
            pool.emplace_back(run);
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace doubletscope
