#pragma once

// Exact evolution of sector-restricted states under piecewise-constant
// exchange schedules, and the observables built on it.

#include <cstdint>
#include <string>
#include <vector>

#include "sage/noise.hpp"
#include "sage/spin_model.hpp"

namespace sage {

/// Ensemble kernels come in two flavours with identical results: a plain
/// loop, and an OpenMP loop that writes per-member slots reduced afterwards
/// in member order.
enum class Exec { kSerial, kParallel };

struct PulseSegment {
  CouplingSet couplings;
  double duration_ns = 0.0;
};

struct PulseSchedule {
  DeviceGeometry geometry;
  std::vector<PulseSegment> segments;
  std::string label;

  explicit PulseSchedule(DeviceGeometry g, std::string name = {})
      : geometry(std::move(g)), label(std::move(name)) {}

  /// Checks duration > 0 and matching geometry.
  void push(PulseSegment s);
  void append(const PulseSchedule& later);
  double duration_ns() const;
};

/// exp(-i 2π H t) from one Hermitian eigendecomposition, reused for any t.
class Propagator {
 public:
  explicit Propagator(const RMatrix& h);
  explicit Propagator(const HermitianOperator& h);

  Eigen::Index dim() const { return w_.size(); }
  const RVector& energies() const { return w_; }
  const CMatrix& eigenvectors() const { return v_; }

  CMatrix unitary(double t_ns) const;
  CVector apply(const CVector& psi, double t_ns) const;

 private:
  RVector w_;
  CMatrix v_;
};

struct QuantumState {
  int n_spins = 0;
  int n_down = 0;
  CVector amplitudes;

  /// Throws InvalidInput unless normalised to 1e-10.
  QuantumState(const SectorBasis& basis, CVector amps);
  double norm() const { return amplitudes.norm(); }
};

struct Trajectory {
  std::vector<double> times_ns;
  std::vector<double> values;
};

QuantumState evolve(const HermitianOperator& h, double t_ns, const QuantumState& psi);

/// Sector unitary of a schedule, segments applied left to right.
/// `noise` may be null for the ideal schedule.
CMatrix schedule_unitary(const PulseSchedule& schedule, const NoiseRealization* noise);

QuantumState run_schedule(const PulseSchedule& schedule, const NoiseRealization& r,
                          const QuantumState& psi0);

/// Encoded (|0> + |1>)/sqrt2 for a 3- or 4-spin encoding, as a sector vector.
CVector plus_state(const DeviceGeometry& geometry);

/// 1 - |C^T psi|^2 for the sector columns `comp` of the qubit subspace.
double leakage(const CVector& psi, const RMatrix& comp);

/// Idle geometry with every bond at `j_idle` (EO_LINEAR idles at J = 0).
CouplingSet idle_couplings(Encoding encoding, double j_idle_mhz);

/// Ensemble-averaged |rho_01| in the frame of the noiseless idle evolution.
Trajectory coherence_trace(Encoding encoding, double j_idle_mhz, const NoiseSpec& spec,
                           int n_realizations, const std::vector<double>& times_ns,
                           std::uint64_t master_seed, std::uint64_t salt = 0,
                           Exec exec = Exec::kParallel);

/// Ensemble-averaged leakage at each time for the idle (|0>+|1>)/sqrt2 state.
Trajectory idle_leakage_trace(Encoding encoding, double j_idle_mhz, const NoiseSpec& spec,
                              int n_realizations, const std::vector<double>& times_ns,
                              std::uint64_t master_seed, std::uint64_t salt = 0,
                              Exec exec = Exec::kParallel);

/// Amplitudes of an 8-spin S_z = 0 sector state embedded in the 256-dim space.
CVector embed_full(const SectorBasis& basis, const CVector& psi);

/// Von Neumann entropy (natural log) of spins 1-4 for an 8-spin sector state.
double entanglement_entropy(const SectorBasis& basis, const CVector& psi);

}  // namespace sage
