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
 * Counter-based random number generation. The whole pipeline derives its
 * randomness from 64-bit seeds through SplitMix64, so that every result is
 * a pure function of (master seed, index) regardless of platform, thread
 * count, or scheduling. std::normal_distribution is deliberately avoided:
 * its algorithm is implementation-defined and would break the stored-seed
 * replay contract across standard libraries.
 */

#pragma once

#include <cstdint>
#include <utility>

namespace hamshadow::rng {

/// Finalizer of the SplitMix64 generator (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a decorrelated child seed from (master, index). Used for
/// per-snapshot and per-sample streams; deterministic and order-free.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    return mix64(mix64(master + kGamma * (index + 1)) ^ (index * 0xD1B54A32D192ED03ULL + kGamma));
}

/// SplitMix64 stream. State advances along a Weyl sequence; each output is
/// a hash of the counter, which is what makes the generator counter-based
/// and trivially splittable via derive_seed.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_open_double() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Consumes exactly two uniforms per
    /// pair; the spare value is cached so consumption order stays fixed.
    double next_gaussian();

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hamshadow::rng
