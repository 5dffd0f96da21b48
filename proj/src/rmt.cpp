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

#include "hamshadow/rmt.hpp"

#include "hamshadow/rng.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace hamshadow::rmt {

GueSample::GueSample(int num_qubits, std::uint64_t seed)
    : num_qubits_(num_qubits), seed_(seed) {
    if (num_qubits < kMinQubits || num_qubits > kMaxQubits) {
        throw std::domain_error("GueSample: num_qubits must be in [1, 12]");
    }
    const int d = 1 << num_qubits;
    const double diag_sd = std::sqrt(1.0 / d);
    const double off_sd = std::sqrt(0.5 / d);
    rng::SplitMix64 stream(seed);
    hamiltonian_.resize(d, d);
    // Fixed draw order (row-major upper triangle) is part of the replay contract.
    for (int i = 0; i < d; ++i) {
        hamiltonian_(i, i) = diag_sd * stream.next_gaussian();
        for (int j = i + 1; j < d; ++j) {
            const double re = off_sd * stream.next_gaussian();
            const double im = off_sd * stream.next_gaussian();
            hamiltonian_(i, j) = std::complex<double>(re, im);
            hamiltonian_(j, i) = std::complex<double>(re, -im);
        }
    }
}

const qmath::EigenSystem& GueSample::eigensystem() const {
    std::call_once(eig_->once, [this] {
        eig_->value = std::make_unique<qmath::EigenSystem>(qmath::hermitian_eig(hamiltonian_));
    });
    return *eig_->value;
}

qmath::ComplexMatrix GueSample::evolution_operator(double t) const {
    if (t < 0.0) throw std::domain_error("evolution_operator: t must be >= 0");
    const auto& eig = eigensystem();
    const int d = dim();
    qmath::ComplexVector phases(d);
    for (int n = 0; n < d; ++n) {
        phases(n) = std::polar(1.0, -eig.energies(n) * t);
    }
    return eig.basis * phases.asDiagonal() * eig.basis.adjoint();
}

qmath::ComplexVector GueSample::evolve(const qmath::ComplexVector& psi, double t) const {
    if (t < 0.0) throw std::domain_error("evolve: t must be >= 0");
    const auto& eig = eigensystem();
    qmath::ComplexVector c = eig.basis.adjoint() * psi;
    for (int n = 0; n < dim(); ++n) {
        c(n) *= std::polar(1.0, -eig.energies(n) * t);
    }
    return eig.basis * c;
}

qmath::ComplexVector GueSample::backpropagated_basis_state(int b, double t) const {
    const auto& eig = eigensystem();
    // V^dag e_b is the conjugated b-th row of V; then U(t)^dag = V e^{+iEt} V^dag.
    qmath::ComplexVector c = eig.basis.row(b).adjoint();
    for (int n = 0; n < dim(); ++n) {
        c(n) *= std::polar(1.0, eig.energies(n) * t);
    }
    return eig.basis * c;
}

GueSample sample_gue(int num_qubits, std::uint64_t seed) {
    return GueSample(num_qubits, seed);
}

double r_factor(double t) {
    if (t < 0.0) throw std::domain_error("r_factor: t must be >= 0");
    if (t == 0.0) return 1.0;
    return qmath::bessel_j1(2.0 * t) / t;
}

double one_minus_r_factor(double t) {
    if (t < 0.0) throw std::domain_error("one_minus_r_factor: t must be >= 0");
    if (t < 0.5) {
        // 1 - r = -sum_{m>=1} (-t^2)^m / (m! (m+1)!) = t^2/2 - t^4/12 + ...
        const double q = -t * t;
        double term = 1.0;
        double sum = 0.0;
        for (int m = 1; m <= 30; ++m) {
            term *= q / (static_cast<double>(m) * (m + 1));
            sum -= term;
            if (std::abs(term) < 1e-20 * std::abs(sum) + 1e-300) break;
        }
        return sum;
    }
    return 1.0 - r_factor(t);
}

EigensystemCache::EigensystemCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

std::shared_ptr<const GueSample> EigensystemCache::get(int num_qubits, std::uint64_t seed) {
    const Key key{num_qubits, seed};
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = map_.find(key);
        if (it != map_.end()) {
            order_.splice(order_.begin(), order_, it->second.second);
            return it->second.first;
        }
    }
    // Build outside the lock; concurrent builders of the same key produce
    // identical samples, so the losing insert is just dropped.
    auto sample = std::make_shared<GueSample>(num_qubits, seed);
    sample->eigensystem();
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(key);
    if (it != map_.end()) {
        order_.splice(order_.begin(), order_, it->second.second);
        return it->second.first;
    }
    order_.push_front(key);
    map_.emplace(key, std::make_pair(sample, order_.begin()));
    while (map_.size() > capacity_) {
        map_.erase(order_.back());
        order_.pop_back();
    }
    return sample;
}

std::size_t EigensystemCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return map_.size();
}

} // namespace hamshadow::rmt
