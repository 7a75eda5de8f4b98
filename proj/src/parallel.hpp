#pragma once

#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace ofdr {

// Parallel map with ordered fold: produce(i) runs on a worker pool in any
// order, consume(i, result) runs on the calling thread in index order. A
// bounded reorder window keeps memory flat regardless of worker skew.
template <typename Result>
void parallel_ordered_map(size_t n, int threads,
                          const std::function<Result(size_t)>& produce,
                          const std::function<void(size_t, Result&&)>& consume) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) consume(i, produce(i));
        return;
    }
    const size_t window = 4 * static_cast<size_t>(threads);

    std::mutex mu;
    std::condition_variable cv_ready, cv_space;
    std::map<size_t, Result> ready;
    std::atomic<size_t> next_idx{0};
    size_t next_consume = 0;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const size_t i = next_idx.fetch_add(1);
            if (i >= n) return;
            try {
                Result r = produce(i);
                std::unique_lock<std::mutex> lock(mu);
                cv_space.wait(lock, [&] {
                    return i < next_consume + window || error;
                });
                if (error) return;
                ready.emplace(i, std::move(r));
                cv_ready.notify_all();
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                cv_ready.notify_all();
                cv_space.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);

    try {
        while (next_consume < n) {
            Result r = [&] {
                std::unique_lock<std::mutex> lock(mu);
                cv_ready.wait(lock, [&] { return ready.count(next_consume) || error; });
                if (error) std::rethrow_exception(error);
                auto it = ready.find(next_consume);
                Result out = std::move(it->second);
                ready.erase(it);
                return out;
            }();
            consume(next_consume, std::move(r));
            {
                std::lock_guard<std::mutex> lock(mu);
                ++next_consume;
            }
            cv_space.notify_all();
        }
    } catch (...) {
        {
            std::lock_guard<std::mutex> lock(mu);
            if (!error) error = std::current_exception();
            next_consume = n;
        }
        cv_space.notify_all();
        for (auto& t : pool) t.join();
        throw;
    }
    for (auto& t : pool) t.join();
}

}  // namespace ofdr
