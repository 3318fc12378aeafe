#include "interferolab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace interferolab {

int thread_budget() {
    if (const char* env = std::getenv("INTERFEROLAB_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
            // fall through to hardware default
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace interferolab
