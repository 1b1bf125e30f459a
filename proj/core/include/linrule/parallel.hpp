#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace linrule {

// 0 means one worker per hardware thread.
[[nodiscard]] std::size_t resolve_workers(std::size_t requested) noexcept;

// Calls task(k) for every k in [0, count) on at most `workers` threads. Tasks
// are claimed in index order; the first exception thrown by any task is
// rethrown after all threads have joined.
void for_each_index(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

// out[k] = task(k). The result is independent of the worker count.
template <class Task>
[[nodiscard]] std::vector<double> map_indices(std::size_t count, std::size_t workers, Task&& task) {
    std::vector<double> out(count);
    for_each_index(count, workers, [&](std::size_t k) { out[k] = task(k); });
    return out;
}

// Fixed-shape pairwise summation: the association order depends only on the
// length, so the bits of the result do too.
[[nodiscard]] double pairwise_sum(std::span<const double> values) noexcept;

struct SampleSummary {
    double mean = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(count); +inf when count < 2
};

[[nodiscard]] SampleSummary summarize(std::span<const double> values);

}  // namespace linrule
