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
 * Protocol simulation: states, observables, measurement sampling, snapshot
 * and shadow production, and the linear / quadratic estimators.
 *
 * A snapshot stores only (seed, t, outcome, num_qubits); the matrices it
 * implies are always regenerated from the seed. Shadows are Hermitian with
 * unit trace but not positive in general — the inverse channel is not
 * completely positive.
 */

#pragma once

#include "hamshadow/channel.hpp"
#include "hamshadow/parallel.hpp"
#include "hamshadow/qmath.hpp"
#include "hamshadow/rmt.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hamshadow::shadows {

/// Negative outcome probabilities beyond this magnitude indicate a broken
/// eigensolve rather than roundoff and fail loudly.
inline constexpr double kProbabilityClipLimit = 1e-8;

/// Default cap on ordered pairs evaluated by the quadratic estimator.
inline constexpr std::uint64_t kDefaultPairBudget = 1000000;

class NumericalHealthError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dense density matrix: Hermitian, unit trace, PSD within tolerance.
/// Named constructors keep track of structure (pure state vector, maximal
/// mixedness) that the sampling pipeline exploits.
class DensityMatrix {
  public:
    static DensityMatrix from_matrix(qmath::ComplexMatrix m);
    static DensityMatrix from_pure_state(qmath::ComplexVector psi);
    static DensityMatrix ghz(int num_qubits);
    static DensityMatrix basis_state(int num_qubits, std::uint64_t bits);
    static DensityMatrix maximally_mixed(int num_qubits);

    const qmath::ComplexMatrix& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    int num_qubits() const { return num_qubits_; }
    const std::optional<qmath::ComplexVector>& pure_state() const { return pure_state_; }
    bool is_maximally_mixed() const { return maximally_mixed_; }

  private:
    DensityMatrix() = default;

    qmath::ComplexMatrix matrix_;
    int num_qubits_ = 0;
    std::optional<qmath::ComplexVector> pure_state_;
    bool maximally_mixed_ = false;
};

/// Replayable measurement record. (seed, t) regenerates U(t); outcome is
/// the measured bitstring.
struct Snapshot {
    std::uint64_t seed = 0;
    double t = 0.0;
    std::uint64_t outcome = 0;
    int num_qubits = 0;

    bool operator==(const Snapshot&) const = default;
};

struct ClassicalShadow {
    qmath::ComplexMatrix matrix;
    Snapshot source;
};

/// Hermitian observable with its cached identity/diagonal/off-diagonal
/// decomposition.
class Observable {
  public:
    static Observable from_matrix(qmath::ComplexMatrix m);
    /// Tensor product of single-qubit Paulis, e.g. "ZIX". Z-only strings are
    /// purely diagonal; anything containing X or Y is purely off-diagonal.
    static Observable pauli(std::string_view spec);
    /// O = (|0...0><1...1| + |1...1><0...0|) / 2, the GHZ corner observable.
    static Observable off_diagonal_fidelity(int num_qubits);
    /// |bits><bits| - 1/D, the traceless-adjusted basis projector.
    static Observable traceless_projector(int num_qubits, std::uint64_t bits);

    const qmath::ComplexMatrix& matrix() const { return matrix_; }
    const channel::OperatorDecomposition& decomposition() const { return decomposition_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    double trace() const { return decomposition_.trace_part * dim(); }
    bool is_diagonal() const { return is_diagonal_; }

  private:
    Observable(qmath::ComplexMatrix m);

    qmath::ComplexMatrix matrix_;
    channel::OperatorDecomposition decomposition_;
    bool is_diagonal_ = false;
};

/// diag(U rho U^dag) clipped at zero (magnitude <= kProbabilityClipLimit,
/// else NumericalHealthError) and renormalized to unit sum.
std::vector<double> outcome_distribution(const DensityMatrix& rho, const qmath::ComplexMatrix& u);

/// Inverse-CDF sampling on one uniform draw.
int sample_outcome(std::span<const double> probabilities, double uniform);

/// Draws `count` snapshots of rho evolved for time t. Snapshot i uses a
/// fresh GUE sample seeded with derive_seed(master_seed, i) and one uniform
/// draw for the outcome; the result is a pure function of the arguments,
/// independent of thread count and iteration order.
std::vector<Snapshot> sample_snapshots(const DensityMatrix& rho, double t, int count,
                                       std::uint64_t master_seed, int threads = 1);

/// sigma = U^dag |b><b| U for the snapshot's unitary.
qmath::ComplexMatrix snapshot_operator(const Snapshot& s);

/// rho_hat = M^{-1}(sigma). Throws ChannelNotInvertibleError for t ~ 0.
ClassicalShadow shadow_from_snapshot(const Snapshot& s);
ClassicalShadow shadow_from_snapshot(const Snapshot& s, rmt::EigensystemCache& cache);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Mean of Tr(O rho_hat_i) with its standard error.
Estimate estimate_linear(std::span<const ClassicalShadow> shadows, const Observable& obs);

/// U-statistic (1/(M(M-1))) sum_{i != j} Tr(O2 rho_hat_i x rho_hat_j) for an
/// observable on two copies. When M(M-1) exceeds pair_budget, a deterministic
/// uniform subsample of ordered pairs is used and the standard error includes
/// the subsampling contribution.
Estimate estimate_quadratic(std::span<const ClassicalShadow> shadows, const Observable& two_copy,
                            std::uint64_t pair_budget = kDefaultPairBudget);

/// Unbiased sample variance of Tr(O rho_hat_i).
double empirical_variance(std::span<const ClassicalShadow> shadows, const Observable& obs);

// ---------------------------------------------------------------------------
// Streaming pipeline.
//
// Sampling at scale must not materialize shadows (10^5 shadows at N = 9
// would be ~20 GB), so the scan below visits each snapshot once, handing the
// visitor the vector u = U(t)^dag |b> from which sigma = u u^dag and every
// estimator input follows in O(D^2). Seeds depend only on (master_seed,
// index), so all grid times share each index's GUE sample and the per-index
// eigensolve is done once for the whole time grid.
// ---------------------------------------------------------------------------

struct SnapshotVisit {
    std::size_t index;      // snapshot index i
    std::size_t time_index; // position of t in the scan grid
    const Snapshot& snapshot;
    const qmath::ComplexVector& u; // U(t)^dag |b>
};

/// Visits every (index, time) snapshot of the run. Within one index, times
/// are visited in grid order by the same thread; distinct indices may run
/// concurrently. The visitor is called once per snapshot.
void scan_snapshots(const DensityMatrix& rho, std::span<const double> times, int count,
                    std::uint64_t master_seed, int threads,
                    const std::function<void(const SnapshotVisit&)>& visit);

/// Tr(O M^{-1}(u u^dag)) evaluated without forming the shadow matrix.
double shadow_expectation(const qmath::ComplexVector& u, const channel::ChannelCoefficients& coeffs,
                          const Observable& obs);

/// Streaming per-time mean/variance of Tr(O rho_hat) over `count` snapshots;
/// equals the materialized estimators bit-for-bit at any thread count.
struct LinearScanResult {
    std::vector<double> times;
    std::vector<parallel::MeanStdErr> mean;        // per time
    std::vector<parallel::VarianceEstimate> variance; // per time
};

LinearScanResult linear_scan(const DensityMatrix& rho, std::span<const double> times, int count,
                             std::uint64_t master_seed, const Observable& obs, int threads);

/// Streaming mean classical shadow (and mean snapshot operator) at one time.
struct MeanShadowResult {
    qmath::ComplexMatrix mean_sigma;  // average snapshot operator
    qmath::ComplexMatrix mean_shadow; // inverse channel applied to mean_sigma
    int count = 0;
};

MeanShadowResult mean_shadow(const DensityMatrix& rho, double t, int count,
                             std::uint64_t master_seed, int threads);

/// Mean shadow reconstructed from persisted snapshots (replay path).
MeanShadowResult mean_shadow_from_snapshots(std::span<const Snapshot> snapshots,
                                            rmt::EigensystemCache& cache, int threads);

} // namespace hamshadow::shadows
