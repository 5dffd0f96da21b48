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
 * Foundation numeric layer: dense complex matrices, the Hermitian
 * eigendecomposition contract, Bessel J1 with its zeros, and the Wigner
 * semicircle density. Everything here is pure and thread-safe.
 */

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hamshadow::qmath {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Hermiticity tolerance: max|A - A^dag| <= kHermitianTol * max|A|.
inline constexpr double kHermitianTol = 1e-12;
/// Eigendecomposition contract tolerance (unitarity and reconstruction).
inline constexpr double kEigenTol = 1e-10;
/// Largest dense dimension the eigensolver accepts (N = 12 qubits).
inline constexpr int kMaxDim = 4096;

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

/// Eigendecomposition A = V diag(energies) V^dag with energies ascending
/// and V unitary within kEigenTol.
struct EigenSystem {
    RealVector energies;
    ComplexMatrix basis;
};

/// Dense Hermitian eigensolve (LAPACK zheevd behind the contract above).
/// Throws std::invalid_argument for non-Hermitian input and
/// std::domain_error for dim > kMaxDim.
EigenSystem hermitian_eig(const ComplexMatrix& a);

/// Bessel function of the first kind, order one. Ascending power series for
/// |x| < 12 (terms truncated below 1e-18 of the running sum), Miller
/// backward recurrence beyond; good to ~1e-13 of the envelope for |x| <= 200.
/// Throws std::domain_error for non-finite input.
double bessel_j1(double x);

/// First k positive zeros of J1, ascending, each refined to 1e-12 by
/// bisection from McMahon starting points. Requires 1 <= k <= 100.
std::vector<double> bessel_j1_zeros(int k);

/// Wigner semicircle density sqrt(4 - E^2) / (2 pi) on [-2, 2], else 0.
double semicircle_density(double energy);

} // namespace hamshadow::qmath
