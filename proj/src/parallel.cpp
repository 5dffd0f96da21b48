// Copyright 2026 The hamshadow authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hamshadow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace hamshadow::parallel {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_chunks(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t chunks = chunk_count(n);
    const int workers = std::min<std::size_t>(resolve_thread_count(threads), chunks);

    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) return;
            try {
                fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    parallel_for_chunks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (const double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanStdErr mean_with_stderr(std::span<const double> xs) {
    MeanStdErr out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n < 2) return out;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n));
    return out;
}

VarianceEstimate variance_with_stderr(std::span<const double> xs) {
    VarianceEstimate out;
    const std::size_t n = xs.size();
    if (n < 2) return out;
    const double mean = pairwise_sum(xs) / static_cast<double>(n);
    std::vector<double> m2(n), m4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean;
        m2[i] = d * d;
        m4[i] = d * d * d * d;
    }
    const double nn = static_cast<double>(n);
    const double s2 = pairwise_sum(m2) / (nn - 1.0);
    const double mu4 = pairwise_sum(m4) / nn;
    out.variance = s2;
    // Var(s^2) ~ (mu4 - s^4 (n-3)/(n-1)) / n
    const double v = (mu4 - s2 * s2 * (nn - 3.0) / (nn - 1.0)) / nn;
    out.std_error = v > 0.0 ? std::sqrt(v) : 0.0;
    return out;
}

} // namespace hamshadow::parallel
