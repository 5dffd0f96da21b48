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

/**
 * @file
 * Thread pool primitives with deterministic reductions. Work is split into
 * fixed-size chunks that are each processed sequentially by exactly one
 * thread; all floating-point reductions happen in index order afterwards,
 * so results are bit-identical for any thread count.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hamshadow::parallel {

/// Fixed chunk width for block accumulators. Independent of thread count by
/// construction so that chunked sums replay identically.
inline constexpr std::size_t kChunkSize = 256;

int resolve_thread_count(int requested);

/// Runs fn(i) for i in [0, n). Chunks of kChunkSize consecutive indices are
/// claimed atomically and processed in order within the chunk. The first
/// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Like parallel_for but hands out whole chunks: fn(chunk_index, begin, end).
/// Use this when a per-chunk accumulator must be filled by a single thread.
void parallel_for_chunks(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t n) {
    return (n + kChunkSize - 1) / kChunkSize;
}

/// Pairwise (cascade) summation; error grows like log(n) ulps instead of n.
double pairwise_sum(std::span<const double> xs);

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean with its standard error, reduced pairwise in index order.
MeanStdErr mean_with_stderr(std::span<const double> xs);

struct VarianceEstimate {
    double variance = 0.0;
    double std_error = 0.0; // standard error of the variance estimate itself
};

/// Unbiased sample variance; std_error uses the fourth central moment.
VarianceEstimate variance_with_stderr(std::span<const double> xs);

} // namespace hamshadow::parallel
