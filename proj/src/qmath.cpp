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

#include "hamshadow/qmath.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hamshadow::qmath {

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigenSystem hermitian_eig(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("hermitian_eig: matrix is not square");
    }
    const int n = static_cast<int>(a.rows());
    if (n > kMaxDim) {
        throw std::domain_error("hermitian_eig: dimension " + std::to_string(n) +
                                " exceeds the dense cap " + std::to_string(kMaxDim));
    }
    if (!is_hermitian(a)) {
        throw std::invalid_argument("hermitian_eig: input violates the Hermitian contract");
    }
    EigenSystem out;
    out.basis = a; // zheevd overwrites with the eigenvectors
    out.energies.resize(n);
    const int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'V', 'L', n,
        reinterpret_cast<lapack_complex_double*>(out.basis.data()), n, out.energies.data());
    if (info != 0) {
        throw std::runtime_error("hermitian_eig: zheevd failed with info=" + std::to_string(info));
    }
    return out;
}

namespace {

// J1 by its ascending power series. Converges for any x but is only used
// for |x| < 12 where cancellation stays harmless.
double bessel_j1_series(double x) {
    const double q = -0.25 * x * x;
    double term = 0.5 * x; // m = 0 term: x/2
    double sum = term;
    for (int m = 1; m <= 60; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Miller backward recurrence: run J_{k-1} = (2k/x) J_k - J_{k+1} down from a
// high trial order, then normalize with J0 + 2*sum J_{2k} = 1. Near machine
// precision for the 12 <= x <= 200 range this project uses.
double bessel_j1_miller(double x) {
    const int start = static_cast<int>(x + 24.0 + 12.0 * std::cbrt(x)) | 1;
    double jp = 0.0;      // J_{k+1}, arbitrary overall scale
    double jc = 1e-30;    // J_k
    double j1 = 0.0;
    double norm = 0.0;    // accumulates J_0 + 2 sum_{m even >= 2} J_m
    for (int k = start; k >= 1; --k) {
        const double jm = (2.0 * k / x) * jc - jp; // J_{k-1}
        jp = jc;
        jc = jm;
        if (k == 1) j1 = jp; // jp holds J_1 after the final step
        if ((k - 1) >= 2 && (k - 1) % 2 == 0) norm += 2.0 * jc;
        if (std::abs(jc) > 1e280) { // rescale to avoid overflow
            jc *= 1e-280;
            jp *= 1e-280;
            j1 *= 1e-280;
            norm *= 1e-280;
        }
    }
    norm += jc; // jc ends as the unnormalized J_0
    return j1 / norm;
}

} // namespace

double bessel_j1(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("bessel_j1: non-finite argument");
    }
    const double ax = std::abs(x);
    const double val = ax < 12.0 ? bessel_j1_series(ax) : bessel_j1_miller(ax);
    return x < 0.0 ? -val : val; // J1 is odd
}

std::vector<double> bessel_j1_zeros(int k) {
    if (k < 1 || k > 100) {
        throw std::domain_error("bessel_j1_zeros: k must be in [1, 100]");
    }
    constexpr double pi = std::numbers::pi;
    std::vector<double> zeros;
    zeros.reserve(k);
    for (int i = 1; i <= k; ++i) {
        // McMahon: x_i ~ beta - 3/(8 beta), beta = (i + 1/4) pi. The true zero
        // sits within 0.1 of beta, so [beta - 0.5, beta + 0.5] brackets it.
        const double beta = (i + 0.25) * pi;
        double lo = beta - 0.5;
        double hi = beta + 0.5;
        double flo = bessel_j1(lo);
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = bessel_j1(mid);
            if ((flo > 0.0) == (fmid > 0.0)) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
            }
        }
        const double root = 0.5 * (lo + hi);
        if (!(root > i * pi && root < (i + 1) * pi + 1.0)) {
            throw std::runtime_error("bessel_j1_zeros: root escaped its bracket");
        }
        zeros.push_back(root);
    }
    return zeros;
}

double semicircle_density(double energy) {
    if (std::abs(energy) >= 2.0) return 0.0;
    return std::sqrt(4.0 - energy * energy) / (2.0 * std::numbers::pi);
}

} // namespace hamshadow::qmath
