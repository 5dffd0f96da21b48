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
 * The measure-and-prepare channel of Hamiltonian-driven shadow tomography.
 *
 * Averaged over the GUE ensemble and measurement outcomes, the map from a
 * state to its classical snapshots acts diagonally on the three mutually
 * orthogonal components of an operator (identity, traceless diagonal,
 * off-diagonal):
 *
 *     M(rho) = 1/D + rho_o / alpha_D(t) + rho_d / beta_D(t),
 *
 * with  lambda_D(t) = ((D r^2(t) + r(2t))^2 - 4 r^2(t)) / ((D+3)(D^2-1)),
 *       1/alpha_D   = 1/(D+1) - lambda_D,
 *       1/beta_D    = 1/(D+1) + D lambda_D,   r(t) = J1(2t)/t.
 *
 * The inverse channel rescales each component by alpha/beta instead. At
 * t = 0 the off-diagonal rate vanishes identically and the channel is not
 * invertible; coefficients near that point carry an explicit flag.
 *
 * These closed forms hold to leading order in D. The empirical_channel
 * Monte-Carlo oracle measures the true transmission rates; observed
 * finite-D deviations are O(1/D) relative (roughly +7% on the diagonal
 * rate at D = 8, t = 1, shrinking with D).
 */

#pragma once

#include "hamshadow/qmath.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hamshadow::channel {

/// Coefficients below this distance from the singular point are flagged
/// non-invertible: |1/(D+1) - lambda| <= kInvertibilityEps.
inline constexpr double kInvertibilityEps = 1e-9;

/// User-facing refusal threshold: the CLI rejects evolution times below
/// this, where alpha amplifies snapshot noise catastrophically.
inline constexpr double kMinInvertibleTime = 0.01;

class ChannelNotInvertibleError : public std::runtime_error {
  public:
    explicit ChannelNotInvertibleError(double t)
        : std::runtime_error("channel is not invertible at t=" + std::to_string(t) +
                             "; the off-diagonal part is lost as t -> 0 (choose t >= " +
                             std::to_string(kMinInvertibleTime) + ")") {}
};

/// Splitting of an operator into trace part, traceless diagonal part, and
/// off-diagonal part; the three pieces are Hilbert-Schmidt orthogonal and
/// sum back to the input.
struct OperatorDecomposition {
    double trace_part = 0.0; // Tr X / D
    qmath::ComplexMatrix diagonal;
    qmath::ComplexMatrix off_diagonal;
};

OperatorDecomposition decompose(const qmath::ComplexMatrix& x);

struct ChannelCoefficients {
    double t = 0.0;
    int dim = 0;
    double lambda = 0.0;
    double inv_alpha = 0.0; ///< 1/(D+1) - lambda; exactly 0 at t = 0
    double inv_beta = 0.0;  ///< 1/(D+1) + D lambda
    bool invertible = false;

    /// Throws ChannelNotInvertibleError when flagged.
    double alpha() const {
        if (!invertible) throw ChannelNotInvertibleError(t);
        return 1.0 / inv_alpha;
    }
    double beta() const { return 1.0 / inv_beta; }
};

/// Requires t >= 0 and dim >= 2. Never throws for t in range: t ~ 0 yields
/// a flagged (non-invertible) result so callers can probe the limit.
ChannelCoefficients coefficients(double t, int dim);

/// M(rho) = 1/D + rho_o * inv_alpha + rho_d * inv_beta. Trace preserving,
/// Hermitian in, Hermitian out. Works for flagged coefficients (t = 0).
qmath::ComplexMatrix forward_channel(const qmath::ComplexMatrix& rho,
                                     const ChannelCoefficients& coeffs);

/// M^{-1}(sigma) = 1/D + alpha sigma_o + beta sigma_d. Exact two-sided
/// inverse of forward_channel on Hermitian inputs; throws
/// ChannelNotInvertibleError for flagged coefficients.
qmath::ComplexMatrix inverse_channel(const qmath::ComplexMatrix& sigma,
                                     const ChannelCoefficients& coeffs);

/// Monte-Carlo estimate of the two transmission rates, the oracle that
/// validates the closed forms above. Averages the single-sample channel
/// over n_samples GUE draws applied to fixed probes (Z on qubit 1 for the
/// diagonal rate, X on qubit 1 for the off-diagonal rate) and returns the
/// Hilbert-Schmidt overlap ratios <X, M(X)> / <X, X> with standard errors.
struct EmpiricalRates {
    double diag_rate = 0.0;
    double diag_std_error = 0.0;
    double off_diag_rate = 0.0;
    double off_diag_std_error = 0.0;
    int samples = 0;
};

EmpiricalRates empirical_channel(double t, int num_qubits, int n_samples, std::uint64_t seed,
                                 int threads = 1);

} // namespace hamshadow::channel
