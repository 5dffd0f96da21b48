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
 * GUE Hamiltonian ensemble, the spectral factor r(t) = J1(2t)/t, and
 * time-evolution operators U(t) = V exp(-i E t) V^dag.
 *
 * The ensemble weight is P(H) ~ exp(-(D/2) Tr H^2): diagonal entries are
 * real N(0, 1/D), off-diagonal entries complex with re/im each N(0, 1/(2D)).
 * The spectral density then approaches the Wigner semicircle of radius 2.
 * r(t) is the leading-order-in-D one-point spectral average; all channel
 * coefficients built on it inherit O(1/D) finite-size corrections, which the
 * Monte-Carlo channel oracle quantifies.
 */

#pragma once

#include "hamshadow/qmath.hpp"

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace hamshadow::rmt {

inline constexpr int kMinQubits = 1;
inline constexpr int kMaxQubits = 12; // D = 4096, the dense-pipeline cap

/// One draw from the GUE, deterministic in (num_qubits, seed). The
/// eigendecomposition is computed on first use and cached; the lazy init is
/// safe for concurrent callers and its result does not depend on who won.
class GueSample {
  public:
    GueSample(int num_qubits, std::uint64_t seed);

    int num_qubits() const { return num_qubits_; }
    int dim() const { return static_cast<int>(hamiltonian_.rows()); }
    std::uint64_t seed() const { return seed_; }
    const qmath::ComplexMatrix& hamiltonian() const { return hamiltonian_; }

    const qmath::EigenSystem& eigensystem() const;

    /// U(t) = V diag(e^{-i E_n t}) V^dag; unitary within 1e-9.
    qmath::ComplexMatrix evolution_operator(double t) const;

    /// U(t) psi without forming the full operator.
    qmath::ComplexVector evolve(const qmath::ComplexVector& psi, double t) const;

    /// U(t)^dag |b>, the vector whose outer product is the classical snapshot.
    qmath::ComplexVector backpropagated_basis_state(int b, double t) const;

  private:
    struct LazyEig {
        std::once_flag once;
        std::unique_ptr<qmath::EigenSystem> value;
    };

    int num_qubits_;
    std::uint64_t seed_;
    qmath::ComplexMatrix hamiltonian_;
    std::unique_ptr<LazyEig> eig_ = std::make_unique<LazyEig>();
};

/// Throws std::domain_error unless kMinQubits <= num_qubits <= kMaxQubits.
GueSample sample_gue(int num_qubits, std::uint64_t seed);

/// r(t) = J1(2t)/t with r(0) = 1; |r| <= 1 on t >= 0.
/// Throws std::domain_error for t < 0.
double r_factor(double t);

/// 1 - r(t) evaluated without cancellation (power series below t = 0.5).
/// Exact complements like 1 - r^4 factor through this; the form-factor
/// closed forms need it to survive t -> 0.
double one_minus_r_factor(double t);

/// Bounded LRU cache of diagonalized GUE samples keyed by (num_qubits, seed).
/// Snapshot replay hits this instead of re-running the eigensolver; safe for
/// concurrent use and the returned samples are immutable.
class EigensystemCache {
  public:
    explicit EigensystemCache(std::size_t capacity = 64);

    std::shared_ptr<const GueSample> get(int num_qubits, std::uint64_t seed);

    std::size_t size() const;
    std::size_t capacity() const { return capacity_; }

  private:
    using Key = std::pair<int, std::uint64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<std::uint64_t>()(k.second * 8191u + static_cast<unsigned>(k.first));
        }
    };

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<Key> order_; // most recent at front
    std::unordered_map<Key, std::pair<std::shared_ptr<const GueSample>, std::list<Key>::iterator>, KeyHash> map_;
};

} // namespace hamshadow::rmt
