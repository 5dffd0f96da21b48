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

#include "hamshadow/shadows.hpp"

#include "hamshadow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace hamshadow::shadows {

using std::complex;

namespace {

constexpr std::uint64_t kOutcomeStreamSalt = 0x6f7574636f6d6531ULL;
constexpr std::uint64_t kPairSubsampleSalt = 0x7061697273616d70ULL;

int qubits_for_dim(Eigen::Index d) {
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    if ((Eigen::Index{1} << n) != d) {
        throw std::invalid_argument("dimension is not a power of two");
    }
    return n;
}

void check_qubit_range(int num_qubits) {
    if (num_qubits < 1 || num_qubits > rmt::kMaxQubits) {
        throw std::domain_error("num_qubits must be in [1, 12]");
    }
}

} // namespace

// --------------------------------------------------------------------------
// DensityMatrix
// --------------------------------------------------------------------------

DensityMatrix DensityMatrix::from_matrix(qmath::ComplexMatrix m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("DensityMatrix: matrix is not square");
    }
    DensityMatrix rho;
    rho.num_qubits_ = qubits_for_dim(m.rows());
    check_qubit_range(rho.num_qubits_);
    if (!qmath::is_hermitian(m)) {
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    }
    if (std::abs(m.trace().real() - 1.0) > 1e-12 || std::abs(m.trace().imag()) > 1e-12) {
        throw std::invalid_argument("DensityMatrix: trace must be 1");
    }
    const auto eig = qmath::hermitian_eig(m);
    if (eig.energies.minCoeff() < -1e-10) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    }
    rho.matrix_ = std::move(m);
    return rho;
}

DensityMatrix DensityMatrix::from_pure_state(qmath::ComplexVector psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-8) {
        throw std::invalid_argument("DensityMatrix: state vector is not normalized");
    }
    psi /= norm;
    DensityMatrix rho;
    rho.num_qubits_ = qubits_for_dim(psi.size());
    check_qubit_range(rho.num_qubits_);
    rho.matrix_ = psi * psi.adjoint();
    rho.pure_state_ = std::move(psi);
    return rho;
}

DensityMatrix DensityMatrix::ghz(int num_qubits) {
    check_qubit_range(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    qmath::ComplexVector psi = qmath::ComplexVector::Zero(d);
    psi(0) = psi(d - 1) = 1.0 / std::numbers::sqrt2;
    return from_pure_state(std::move(psi));
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::uint64_t bits) {
    check_qubit_range(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    if (bits >= static_cast<std::uint64_t>(d)) {
        throw std::domain_error("basis_state: bitstring out of range");
    }
    qmath::ComplexVector psi = qmath::ComplexVector::Zero(d);
    psi(static_cast<Eigen::Index>(bits)) = 1.0;
    return from_pure_state(std::move(psi));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    check_qubit_range(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    DensityMatrix rho;
    rho.num_qubits_ = num_qubits;
    rho.matrix_ = qmath::ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    rho.maximally_mixed_ = true;
    return rho;
}

// --------------------------------------------------------------------------
// Observable
// --------------------------------------------------------------------------

Observable::Observable(qmath::ComplexMatrix m) : matrix_(std::move(m)) {
    decomposition_ = channel::decompose(matrix_);
    is_diagonal_ = decomposition_.off_diagonal.cwiseAbs().maxCoeff() == 0.0;
}

Observable Observable::from_matrix(qmath::ComplexMatrix m) {
    if (!qmath::is_hermitian(m)) {
        throw std::invalid_argument("Observable: not Hermitian within tolerance");
    }
    return Observable(std::move(m));
}

Observable Observable::pauli(std::string_view spec) {
    const int n = static_cast<int>(spec.size());
    check_qubit_range(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    // Leftmost letter acts on the most significant bit (qubit 1).
    std::uint64_t xmask = 0;
    for (int q = 0; q < n; ++q) {
        const char c = spec[q];
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw std::invalid_argument("Observable::pauli: letters must be I, X, Y or Z");
        }
        if (c == 'X' || c == 'Y') xmask |= std::uint64_t{1} << (n - 1 - q);
    }
    qmath::ComplexMatrix m = qmath::ComplexMatrix::Zero(d, d);
    for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(d); ++col) {
        complex<double> val = 1.0;
        for (int q = 0; q < n; ++q) {
            const bool bit = (col >> (n - 1 - q)) & 1u;
            switch (spec[q]) {
                case 'Y': val *= bit ? complex<double>(0, -1) : complex<double>(0, 1); break;
                case 'Z': val *= bit ? -1.0 : 1.0; break;
                default: break; // I and X contribute a factor 1
            }
        }
        m(static_cast<Eigen::Index>(col ^ xmask), static_cast<Eigen::Index>(col)) = val;
    }
    return Observable(std::move(m));
}

Observable Observable::off_diagonal_fidelity(int num_qubits) {
    check_qubit_range(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    qmath::ComplexMatrix m = qmath::ComplexMatrix::Zero(d, d);
    m(0, d - 1) = 0.5;
    m(d - 1, 0) = 0.5;
    return Observable(std::move(m));
}

Observable Observable::traceless_projector(int num_qubits, std::uint64_t bits) {
    check_qubit_range(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    if (bits >= static_cast<std::uint64_t>(d)) {
        throw std::domain_error("traceless_projector: bitstring out of range");
    }
    qmath::ComplexMatrix m =
        qmath::ComplexMatrix::Identity(d, d) * complex<double>(-1.0 / static_cast<double>(d));
    m(static_cast<Eigen::Index>(bits), static_cast<Eigen::Index>(bits)) += 1.0;
    return Observable(std::move(m));
}

// --------------------------------------------------------------------------
// Measurement sampling
// --------------------------------------------------------------------------

namespace {

// Shared clip-and-renormalize with the numerical-health check.
std::vector<double> finalize_distribution(std::vector<double> p) {
    double clip = 0.0;
    for (double& x : p) {
        if (x < 0.0) {
            clip = std::max(clip, -x);
            x = 0.0;
        }
    }
    if (clip > kProbabilityClipLimit) {
        throw NumericalHealthError("outcome distribution has negative probability " +
                                   std::to_string(-clip) + "; eigensolve is unhealthy");
    }
    const double sum = parallel::pairwise_sum(p);
    if (sum <= 0.0) {
        throw NumericalHealthError("outcome distribution sums to zero");
    }
    for (double& x : p) x /= sum;
    return p;
}

} // namespace

std::vector<double> outcome_distribution(const DensityMatrix& rho, const qmath::ComplexMatrix& u) {
    const int d = rho.dim();
    if (u.rows() != d || u.cols() != d) {
        throw std::invalid_argument("outcome_distribution: dimension mismatch");
    }
    if ((u * u.adjoint() - qmath::ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("outcome_distribution: matrix is not unitary within 1e-9");
    }
    std::vector<double> p(d);
    for (int b = 0; b < d; ++b) {
        p[b] = (u.row(b) * rho.matrix() * u.row(b).adjoint())(0, 0).real();
    }
    return finalize_distribution(std::move(p));
}

int sample_outcome(std::span<const double> probabilities, double uniform) {
    double cum = 0.0;
    const int d = static_cast<int>(probabilities.size());
    for (int b = 0; b < d; ++b) {
        cum += probabilities[b];
        if (uniform < cum) return b;
    }
    return d - 1; // uniform landed in the roundoff tail
}

void scan_snapshots(const DensityMatrix& rho, std::span<const double> times, int count,
                    std::uint64_t master_seed, int threads,
                    const std::function<void(const SnapshotVisit&)>& visit) {
    const int n_qubits = rho.num_qubits();
    const int d = rho.dim();
    if (count < 1) throw std::domain_error("scan_snapshots: count must be >= 1");
    for (const double t : times) {
        if (!channel::coefficients(t, d).invertible) {
            throw channel::ChannelNotInvertibleError(t);
        }
    }

    parallel::parallel_for_chunks(count, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t seed = rng::derive_seed(master_seed, i);
            const rmt::GueSample sample(n_qubits, seed);
            const auto& eig = sample.eigensystem();
            const double uniform =
                rng::SplitMix64(rng::derive_seed(seed, kOutcomeStreamSalt)).next_double();

            // t-independent pieces of the outcome distribution.
            qmath::ComplexVector basis_state_coeffs;
            qmath::ComplexMatrix rho_in_eigenbasis;
            if (rho.pure_state()) {
                basis_state_coeffs = eig.basis.adjoint() * (*rho.pure_state());
            } else if (!rho.is_maximally_mixed()) {
                rho_in_eigenbasis = eig.basis.adjoint() * rho.matrix() * eig.basis;
            }

            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                const double t = times[ti];
                std::vector<double> p(d);
                if (rho.is_maximally_mixed()) {
                    std::fill(p.begin(), p.end(), 1.0 / d);
                } else if (rho.pure_state()) {
                    qmath::ComplexVector c = basis_state_coeffs;
                    for (int n = 0; n < d; ++n) c(n) *= std::polar(1.0, -eig.energies(n) * t);
                    const qmath::ComplexVector w = eig.basis * c;
                    for (int b = 0; b < d; ++b) p[b] = std::norm(w(b));
                    p = finalize_distribution(std::move(p));
                } else {
                    qmath::ComplexMatrix m = rho_in_eigenbasis;
                    for (int r = 0; r < d; ++r) {
                        for (int c = 0; c < d; ++c) {
                            m(r, c) *= std::polar(1.0, -(eig.energies(r) - eig.energies(c)) * t);
                        }
                    }
                    const qmath::ComplexMatrix evolved = eig.basis * m * eig.basis.adjoint();
                    for (int b = 0; b < d; ++b) p[b] = evolved(b, b).real();
                    p = finalize_distribution(std::move(p));
                }

                const int b = sample_outcome(p, uniform);
                const Snapshot snap{seed, t, static_cast<std::uint64_t>(b), n_qubits};
                const qmath::ComplexVector u = sample.backpropagated_basis_state(b, t);
                visit(SnapshotVisit{i, ti, snap, u});
            }
        }
    });
}

std::vector<Snapshot> sample_snapshots(const DensityMatrix& rho, double t, int count,
                                       std::uint64_t master_seed, int threads) {
    std::vector<Snapshot> out(count);
    const double times[1] = {t};
    scan_snapshots(rho, times, count, master_seed, threads,
                   [&](const SnapshotVisit& v) { out[v.index] = v.snapshot; });
    return out;
}

qmath::ComplexMatrix snapshot_operator(const Snapshot& s) {
    const rmt::GueSample sample(s.num_qubits, s.seed);
    const qmath::ComplexVector u =
        sample.backpropagated_basis_state(static_cast<int>(s.outcome), s.t);
    return u * u.adjoint();
}

namespace {

ClassicalShadow shadow_from_vector(const Snapshot& s, const qmath::ComplexVector& u) {
    const int d = static_cast<int>(u.size());
    const auto coeffs = channel::coefficients(s.t, d);
    ClassicalShadow shadow;
    shadow.matrix = channel::inverse_channel(u * u.adjoint(), coeffs);
    shadow.source = s;
    return shadow;
}

} // namespace

ClassicalShadow shadow_from_snapshot(const Snapshot& s) {
    const rmt::GueSample sample(s.num_qubits, s.seed);
    return shadow_from_vector(s, sample.backpropagated_basis_state(static_cast<int>(s.outcome), s.t));
}

ClassicalShadow shadow_from_snapshot(const Snapshot& s, rmt::EigensystemCache& cache) {
    const auto sample = cache.get(s.num_qubits, s.seed);
    return shadow_from_vector(s, sample->backpropagated_basis_state(static_cast<int>(s.outcome), s.t));
}

// --------------------------------------------------------------------------
// Estimators
// --------------------------------------------------------------------------

namespace {

double trace_product(const qmath::ComplexMatrix& a, const qmath::ComplexMatrix& b) {
    return a.transpose().cwiseProduct(b).sum().real(); // Tr(a b)
}

} // namespace

Estimate estimate_linear(std::span<const ClassicalShadow> shadows, const Observable& obs) {
    if (shadows.size() < 2) {
        throw std::invalid_argument("estimate_linear: need at least two shadows");
    }
    std::vector<double> values(shadows.size());
    for (std::size_t i = 0; i < shadows.size(); ++i) {
        values[i] = trace_product(obs.matrix(), shadows[i].matrix);
    }
    const auto stats = parallel::mean_with_stderr(values);
    return Estimate{stats.mean, stats.std_error};
}

double empirical_variance(std::span<const ClassicalShadow> shadows, const Observable& obs) {
    if (shadows.size() < 2) {
        throw std::invalid_argument("empirical_variance: need at least two shadows");
    }
    std::vector<double> values(shadows.size());
    for (std::size_t i = 0; i < shadows.size(); ++i) {
        values[i] = trace_product(obs.matrix(), shadows[i].matrix);
    }
    return parallel::variance_with_stderr(values).variance;
}

namespace {

// Tr(O2 (A x B)) = sum_{i1 j1} A(j1, i1) Tr(O2[i1, j1] B), with O2[i1, j1]
// the (d x d) block of the two-copy observable.
double pair_kernel(const qmath::ComplexMatrix& o2, const qmath::ComplexMatrix& a,
                   const qmath::ComplexMatrix& b, int d) {
    complex<double> acc = 0.0;
    for (int i1 = 0; i1 < d; ++i1) {
        for (int j1 = 0; j1 < d; ++j1) {
            const complex<double> blocktrace =
                o2.block(i1 * d, j1 * d, d, d).transpose().cwiseProduct(b).sum();
            acc += a(j1, i1) * blocktrace;
        }
    }
    return acc.real();
}

} // namespace

Estimate estimate_quadratic(std::span<const ClassicalShadow> shadows, const Observable& two_copy,
                            std::uint64_t pair_budget) {
    const std::size_t m = shadows.size();
    if (m < 2) {
        throw std::invalid_argument("estimate_quadratic: need at least two shadows");
    }
    const int d = static_cast<int>(shadows[0].matrix.rows());
    if (two_copy.dim() != d * d) {
        throw std::invalid_argument("estimate_quadratic: observable must act on two copies");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(m) * (m - 1);
    const qmath::ComplexMatrix& o2 = two_copy.matrix();

    std::vector<double> values;
    std::vector<double> row_sum(m, 0.0);
    std::vector<double> row_count(m, 0.0);
    if (total <= pair_budget) {
        values.reserve(total);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                const double h = pair_kernel(o2, shadows[i].matrix, shadows[j].matrix, d);
                values.push_back(h);
                row_sum[i] += h;
                row_sum[j] += h;
                row_count[i] += 1.0;
                row_count[j] += 1.0;
            }
        }
    } else {
        // Deterministic uniform subsample of ordered pairs.
        rng::SplitMix64 stream(rng::derive_seed(kPairSubsampleSalt, m));
        values.reserve(pair_budget);
        while (values.size() < pair_budget) {
            const std::size_t i = static_cast<std::size_t>(stream.next() % m);
            const std::size_t j = static_cast<std::size_t>(stream.next() % m);
            if (i == j) continue;
            const double h = pair_kernel(o2, shadows[i].matrix, shadows[j].matrix, d);
            values.push_back(h);
            row_sum[i] += h;
            row_sum[j] += h;
            row_count[i] += 1.0;
            row_count[j] += 1.0;
        }
    }

    const auto stats = parallel::mean_with_stderr(values);
    const double n_pairs = static_cast<double>(values.size());
    const double var_h = stats.std_error * stats.std_error * n_pairs;

    // U-statistic error: between-shadow component 4 Var(psi_i)/M plus the
    // subsampling component Var(h)/n. The raw row-mean variance includes a
    // within-row noise term Var(h)/avg_pairs_per_row, subtracted off below.
    std::vector<double> psi(m, 0.0);
    double avg_pairs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        psi[i] = row_count[i] > 0.0 ? row_sum[i] / row_count[i] : stats.mean;
        avg_pairs += row_count[i];
    }
    avg_pairs /= static_cast<double>(m);
    const double var_psi_raw = parallel::variance_with_stderr(psi).variance;
    const double var_psi =
        std::max(0.0, var_psi_raw - (avg_pairs > 0.0 ? var_h / avg_pairs : 0.0));
    const double between = 4.0 * var_psi / static_cast<double>(m);
    const double subsample = total <= pair_budget ? 0.0 : var_h / n_pairs;
    return Estimate{stats.mean, std::sqrt(between + subsample)};
}

// --------------------------------------------------------------------------
// Streaming pipeline
// --------------------------------------------------------------------------

double shadow_expectation(const qmath::ComplexVector& u, const channel::ChannelCoefficients& coeffs,
                          const Observable& obs) {
    const int d = coeffs.dim;
    const qmath::ComplexMatrix& o = obs.matrix();
    double diag_overlap = 0.0; // sum_i O_ii |u_i|^2
    for (int i = 0; i < d; ++i) {
        diag_overlap += o(i, i).real() * std::norm(u(i));
    }
    const double trace_term = obs.trace() / d;
    double off_overlap = 0.0;
    if (!obs.is_diagonal()) {
        off_overlap = (u.adjoint() * o * u)(0, 0).real() - diag_overlap;
    }
    return trace_term + coeffs.alpha() * off_overlap + coeffs.beta() * (diag_overlap - trace_term);
}

LinearScanResult linear_scan(const DensityMatrix& rho, std::span<const double> times, int count,
                             std::uint64_t master_seed, const Observable& obs, int threads) {
    LinearScanResult result;
    result.times.assign(times.begin(), times.end());
    std::vector<channel::ChannelCoefficients> coeffs;
    coeffs.reserve(times.size());
    for (const double t : times) coeffs.push_back(channel::coefficients(t, rho.dim()));

    std::vector<std::vector<double>> values(times.size(), std::vector<double>(count));
    scan_snapshots(rho, times, count, master_seed, threads, [&](const SnapshotVisit& v) {
        values[v.time_index][v.index] = shadow_expectation(v.u, coeffs[v.time_index], obs);
    });

    result.mean.reserve(times.size());
    result.variance.reserve(times.size());
    for (const auto& column : values) {
        result.mean.push_back(parallel::mean_with_stderr(column));
        result.variance.push_back(parallel::variance_with_stderr(column));
    }
    return result;
}

namespace {

// Chunk-indexed rank-one accumulation: each chunk is filled by one thread,
// then chunks reduce in index order, so the sum replays bit-identically for
// any thread count.
class ChunkedMatrixSum {
  public:
    ChunkedMatrixSum(std::size_t count, int dim)
        : chunks_(parallel::chunk_count(count), qmath::ComplexMatrix::Zero(dim, dim)) {}

    void add(std::size_t index, const qmath::ComplexVector& u) {
        chunks_[index / parallel::kChunkSize] += u * u.adjoint();
    }

    qmath::ComplexMatrix reduce() const {
        qmath::ComplexMatrix total = chunks_.front();
        for (std::size_t c = 1; c < chunks_.size(); ++c) total += chunks_[c];
        return total;
    }

  private:
    std::vector<qmath::ComplexMatrix> chunks_;
};

} // namespace

MeanShadowResult mean_shadow(const DensityMatrix& rho, double t, int count,
                             std::uint64_t master_seed, int threads) {
    const auto coeffs = channel::coefficients(t, rho.dim());
    ChunkedMatrixSum sum(count, rho.dim());
    const double times[1] = {t};
    scan_snapshots(rho, times, count, master_seed, threads,
                   [&](const SnapshotVisit& v) { sum.add(v.index, v.u); });
    MeanShadowResult out;
    out.mean_sigma = sum.reduce() / static_cast<double>(count);
    out.mean_shadow = channel::inverse_channel(out.mean_sigma, coeffs);
    out.count = count;
    return out;
}

MeanShadowResult mean_shadow_from_snapshots(std::span<const Snapshot> snapshots,
                                            rmt::EigensystemCache& cache, int threads) {
    if (snapshots.empty()) {
        throw std::invalid_argument("mean_shadow_from_snapshots: no snapshots");
    }
    const int n_qubits = snapshots[0].num_qubits;
    const double t = snapshots[0].t;
    for (const Snapshot& s : snapshots) {
        if (s.num_qubits != n_qubits || s.t != t) {
            throw std::invalid_argument("mean_shadow_from_snapshots: mixed (N, t) records");
        }
    }
    const int d = 1 << n_qubits;
    const auto coeffs = channel::coefficients(t, d);
    if (!coeffs.invertible) throw channel::ChannelNotInvertibleError(t);

    ChunkedMatrixSum sum(snapshots.size(), d);
    parallel::parallel_for(snapshots.size(), threads, [&](std::size_t i) {
        const auto sample = cache.get(n_qubits, snapshots[i].seed);
        sum.add(i, sample->backpropagated_basis_state(static_cast<int>(snapshots[i].outcome),
                                                      snapshots[i].t));
    });
    MeanShadowResult out;
    out.mean_sigma = sum.reduce() / static_cast<double>(snapshots.size());
    out.mean_shadow = channel::inverse_channel(out.mean_sigma, coeffs);
    out.count = static_cast<int>(snapshots.size());
    return out;
}

} // namespace hamshadow::shadows
