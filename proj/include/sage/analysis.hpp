#pragma once

// Decay fits, randomized-benchmarking statistics, two-qubit invariants and
// fidelities, and Schrieffer-Wolff effective Hamiltonians.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sage/dynamics.hpp"
#include "sage/types.hpp"

namespace sage {

enum class FitStatus { kOk, kNoDecay, kFailed };

std::string_view to_string(FitStatus s);

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  /// T2R in the time unit of the input for Gaussian fits, p for RB fits.
  double rate = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double residual_norm = 0.0;
  FitStatus status = FitStatus::kOk;

  bool ok() const { return status == FitStatus::kOk; }
  /// 1 - (1 - p)/2, only meaningful for RB fits.
  double clifford_fidelity() const { return 1.0 - (1.0 - rate) / 2.0; }
};

/// A exp(-(t/T)^2) + B. Needs >= 20 samples. A trace that moves less than
/// 1% over the window returns kNoDecay with T set to the window end.
FitResult fit_gaussian_decay(const std::vector<double>& t, const std::vector<double>& y);
inline FitResult fit_gaussian_decay(const Trajectory& tr) { return fit_gaussian_decay(tr.times_ns, tr.values); }

/// exp(-(t/T)^2) with unit amplitude and zero offset, for normalised envelopes.
FitResult fit_gaussian_envelope(const std::vector<double>& t, const std::vector<double>& y);

/// A p^N + B over >= 5 sequence lengths.
FitResult fit_rb_decay(const std::vector<double>& lengths, const std::vector<double>& y);

struct DecayMeasurement {
  FitResult fit;
  Trajectory trace;  // the refined-window trace that was fitted
};

/// Two-pass grid: a coarse geometric scan over [t_min, t_max] locates the
/// point where the trace falls to 1/e of its start, then `n_points` linear
/// samples on [0, 3 knee] are fitted.
DecayMeasurement measure_gaussian_decay(const std::function<Trajectory(const std::vector<double>&)>& trace,
                                        double t_min, double t_max, int n_points = 200);

using Matrix4c = Eigen::Matrix4cd;

struct MakhlinInvariants {
  cplx g1;
  double g2 = 0.0;
};

/// Throws InvalidInput if `u` is not unitary to 1e-8.
MakhlinInvariants makhlin_invariants(const Matrix4c& u);
/// |(G1, G2) - (0, 1)|
double cnot_deviation(const Matrix4c& u);

/// Unitary factor of the polar decomposition.
CMatrix polar_unitary(const CMatrix& m);

/// (|tr(V^† M)|^2 + tr(M^† M)) / (d (d + 1)); `m` may be sub-unitary.
double average_gate_fidelity(const CMatrix& m, const CMatrix& target);

/// max |U e^{iφ} - V| with φ fixed by the largest-magnitude entry of V.
double phase_distance(const CMatrix& u, const CMatrix& v);

const Matrix4c& cnot_matrix();

/// Pauli coefficients c[4a + b] on σ_a ⊗ σ_b, a/b in {I, X, Y, Z}; the first
/// factor is qubit 1.
using PauliTable = std::array<double, 16>;
PauliTable pauli_decompose(const Matrix4c& h);
Matrix4c pauli_reconstruct(const PauliTable& c);
/// "IZ", "XX", ...
std::string pauli_name(int index);

struct EffectiveHamiltonian {
  Matrix4c matrix;      // correction relative to the unperturbed energy
  double e0 = 0.0;      // unperturbed computational energy
  PauliTable pauli() const { return pauli_decompose(matrix); }
};

/// Perturbative block reduction onto the columns `comp` of a degenerate
/// eigenspace of `h0`, perturbed by `v` (all real symmetric, sector basis).
/// order 2 or 3. Throws Error if `comp` is not a degenerate eigenspace or an
/// energy denominator drops below 1e-9 of the spectral scale.
EffectiveHamiltonian schrieffer_wolff(const RMatrix& h0, const RMatrix& v, const RMatrix& comp, int order);

/// Exact variant: least-action (polar) rotation of the eigenvectors of h0+v
/// with the largest weight on `comp`.
EffectiveHamiltonian exact_block_diagonalization(const RMatrix& h0, const RMatrix& v, const RMatrix& comp);

}  // namespace sage
