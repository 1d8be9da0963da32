#pragma once

// Two SAGE qubits joined by one interqubit exchange: CNOT construction,
// invariant scans, entanglement and noisy fidelity.

#include <cstdint>
#include <vector>

#include "sage/analysis.hpp"
#include "sage/gates.hpp"

namespace sage {

/// Both blocks at J_0 on every intraqubit bond, `jc` on the interqubit bond.
CouplingSet pair_couplings(const DeviceGeometry& geometry, double j0_mhz, double jc_mhz);

/// 3 J_0 / (4 J_c^2) - 45 / (64 J_c), in ns.
double cnot_time_estimate_ns(double j0_mhz, double jc_mhz);
/// 3/8 + 9 J_c / (128 J_0)
double theta_estimate(double j0_mhz, double jc_mhz);

/// Qubit block of the constant interaction segment, from one diagonalisation.
class InteractionPropagator {
 public:
  InteractionPropagator(const DeviceGeometry& geometry, double j0_mhz, double jc_mhz);
  Matrix4c block(double t_ns) const;
  /// 70-dim sector propagator applied to `psi`.
  CVector apply(const CVector& psi, double t_ns) const;
  const SectorBasis& basis() const { return basis_; }
  const RMatrix& comp() const { return comp_; }

 private:
  SectorBasis basis_;
  RMatrix comp_;
  Propagator prop_;
  CMatrix a_;  // C^T V
};

/// (I ⊗ H)(O ⊗ O) M (I ⊗ H), O = exp(iπθ/2 σz).
Matrix4c cnot_circuit(const Matrix4c& m, double theta);

struct DeviationPoint {
  double t_ns;
  double deviation;
  double leakage;  // 1 - tr(M^† M)/4
};

std::vector<DeviationPoint> deviation_scan(const InteractionPropagator& p, const std::vector<double>& times_ns);

struct CnotResult {
  PulseSchedule schedule;
  double j0_mhz = 0.0;
  double jc_mhz = 0.0;
  double t_estimate_ns = 0.0;
  double t_makhlin_ns = 0.0;   // global minimum of the invariant deviation
  double makhlin_min = 0.0;
  double t_cnot_ns = 0.0;      // interaction time used in the schedule
  double theta_guess = 0.0;
  double theta = 0.0;
  double fidelity = 0.0;       // full schedule, zero noise
  double leakage = 0.0;        // gate-averaged, full schedule
  double max_inpulse_leakage = 0.0;
};

/// Scans the interaction time over [0.5, 1.5] x the estimate at a step of
/// 1/(16 J_0), locates the invariant valley around the global minimum and
/// picks the fidelity-maximising time inside it; θ by golden section within
/// ±0.05 of the estimate. Throws InvalidInput when J_c >= J_0/2.
CnotResult cnot_schedule(double j0_mhz, double jc_mhz,
                         const DeviceGeometry& geometry = DeviceGeometry::sage_pair_8dot());

/// Entropy of spins 1-4 during the bare interaction, starting from the
/// state the circuit feeds in: (|00> + |10>)/sqrt2 after H on the target.
Trajectory entropy_trace(const InteractionPropagator& p, const std::vector<double>& times_ns);

struct NoisyGateStats {
  double fidelity = 0.0;
  double leakage = 0.0;
  double fidelity_stderr = 0.0;
};

NoisyGateStats noisy_cnot(const CnotResult& cnot, const NoiseSpec& spec, int n_realizations,
                          std::uint64_t master_seed, std::uint64_t salt = 0, Exec exec = Exec::kParallel);

}  // namespace sage
