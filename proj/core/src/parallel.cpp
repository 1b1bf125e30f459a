#include "linrule/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace linrule {

std::size_t resolve_workers(std::size_t requested) noexcept {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void for_each_index(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
    workers = std::min(resolve_workers(workers), count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) task(k);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto drain = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t k = next.fetch_add(1, std::memory_order_relaxed);
            if (k >= count) return;
            try {
                task(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kLeaf = 8;
    if (values.size() <= kLeaf) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
    SampleSummary out;
    const std::size_t count = values.size();
    if (count == 0) {
        out.mean = std::numeric_limits<double>::quiet_NaN();
        out.std_error = std::numeric_limits<double>::infinity();
        return out;
    }
    // constant samples summarize exactly: mean = value, std_error = 0
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
        out.mean = values.front();
        out.std_error = count < 2 ? std::numeric_limits<double>::infinity() : 0.0;
        return out;
    }
    out.mean = pairwise_sum(values) / static_cast<double>(count);
    if (count < 2) {
        out.std_error = std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<double> squares(count);
    std::transform(values.begin(), values.end(), squares.begin(), [&](double v) {
        const double dev = v - out.mean;
        return dev * dev;
    });
    const double variance = pairwise_sum(squares) / static_cast<double>(count - 1);
    out.std_error = std::sqrt(variance / static_cast<double>(count));
    return out;
}

}  // namespace linrule
