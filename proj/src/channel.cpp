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

#include "hamshadow/channel.hpp"

#include "hamshadow/parallel.hpp"
#include "hamshadow/rmt.hpp"
#include "hamshadow/rng.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hamshadow::channel {

OperatorDecomposition decompose(const qmath::ComplexMatrix& x) {
    if (x.rows() != x.cols()) {
        throw std::invalid_argument("decompose: matrix is not square");
    }
    const int d = static_cast<int>(x.rows());
    OperatorDecomposition out;
    out.trace_part = x.trace().real() / d;
    out.diagonal = qmath::ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        out.diagonal(i, i) = x(i, i) - out.trace_part;
    }
    out.off_diagonal = x;
    out.off_diagonal.diagonal().setZero();
    return out;
}

ChannelCoefficients coefficients(double t, int dim) {
    if (t < 0.0) throw std::domain_error("coefficients: t must be >= 0");
    if (dim < 2) throw std::domain_error("coefficients: dim must be >= 2");
    const double d = dim;
    const double r1 = rmt::r_factor(t);
    const double r2 = rmt::r_factor(2.0 * t);
    const double num = (d * r1 * r1 + r2) * (d * r1 * r1 + r2) - 4.0 * r1 * r1;
    ChannelCoefficients c;
    c.t = t;
    c.dim = dim;
    c.lambda = num / ((d + 3.0) * (d * d - 1.0));
    c.inv_alpha = 1.0 / (d + 1.0) - c.lambda;
    c.inv_beta = 1.0 / (d + 1.0) + d * c.lambda;
    c.invertible = std::abs(c.inv_alpha) > kInvertibilityEps;
    return c;
}

qmath::ComplexMatrix forward_channel(const qmath::ComplexMatrix& rho,
                                     const ChannelCoefficients& coeffs) {
    const int d = coeffs.dim;
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("forward_channel: dimension mismatch");
    }
    const OperatorDecomposition parts = decompose(rho);
    qmath::ComplexMatrix out = coeffs.inv_alpha * parts.off_diagonal;
    out += coeffs.inv_beta * parts.diagonal;
    out += parts.trace_part * qmath::ComplexMatrix::Identity(d, d);
    return out;
}

qmath::ComplexMatrix inverse_channel(const qmath::ComplexMatrix& sigma,
                                     const ChannelCoefficients& coeffs) {
    if (!coeffs.invertible) throw ChannelNotInvertibleError(coeffs.t);
    const int d = coeffs.dim;
    if (sigma.rows() != d || sigma.cols() != d) {
        throw std::invalid_argument("inverse_channel: dimension mismatch");
    }
    const OperatorDecomposition parts = decompose(sigma);
    qmath::ComplexMatrix out = coeffs.alpha() * parts.off_diagonal;
    out += coeffs.beta() * parts.diagonal;
    out += parts.trace_part * qmath::ComplexMatrix::Identity(d, d);
    return out;
}

namespace {

// Single-sample channel applied to a probe: sum_b U^dag |b><b| U <b| U X U^dag |b>,
// i.e. conjugate, keep the diagonal, conjugate back.
double overlap_ratio(const qmath::ComplexMatrix& u, const qmath::ComplexMatrix& probe,
                     double probe_norm2) {
    const qmath::ComplexMatrix w = u * probe * u.adjoint();
    qmath::ComplexMatrix diag = qmath::ComplexMatrix::Zero(w.rows(), w.cols());
    diag.diagonal() = w.diagonal();
    const qmath::ComplexMatrix mapped = u.adjoint() * diag * u;
    return (probe.adjoint() * mapped).trace().real() / probe_norm2;
}

} // namespace

EmpiricalRates empirical_channel(double t, int num_qubits, int n_samples, std::uint64_t seed,
                                 int threads) {
    if (num_qubits < 1 || num_qubits > 6) {
        throw std::domain_error("empirical_channel: num_qubits must be in [1, 6]");
    }
    if (n_samples < 100) {
        throw std::domain_error("empirical_channel: need at least 100 samples");
    }
    const int d = 1 << num_qubits;

    // Probes: Z on the first qubit (traceless diagonal) and X on the first
    // qubit (purely off-diagonal). Two scalars fix the channel's two rates.
    qmath::ComplexMatrix probe_z = qmath::ComplexMatrix::Zero(d, d);
    qmath::ComplexMatrix probe_x = qmath::ComplexMatrix::Zero(d, d);
    const int top_bit = 1 << (num_qubits - 1);
    for (int b = 0; b < d; ++b) {
        probe_z(b, b) = (b & top_bit) ? -1.0 : 1.0;
        probe_x(b ^ top_bit, b) = 1.0;
    }
    const double norm2 = d;

    std::vector<double> diag_ratios(n_samples), off_ratios(n_samples);
    parallel::parallel_for(n_samples, threads, [&](std::size_t i) {
        const rmt::GueSample sample(num_qubits, rng::derive_seed(seed, i));
        const qmath::ComplexMatrix u = sample.evolution_operator(t);
        diag_ratios[i] = overlap_ratio(u, probe_z, norm2);
        off_ratios[i] = overlap_ratio(u, probe_x, norm2);
    });

    const auto diag_stats = parallel::mean_with_stderr(diag_ratios);
    const auto off_stats = parallel::mean_with_stderr(off_ratios);
    EmpiricalRates rates;
    rates.diag_rate = diag_stats.mean;
    rates.diag_std_error = diag_stats.std_error;
    rates.off_diag_rate = off_stats.mean;
    rates.off_diag_std_error = off_stats.std_error;
    rates.samples = n_samples;
    return rates;
}

} // namespace hamshadow::channel
