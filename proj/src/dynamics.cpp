#include "sage/dynamics.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sage {

void PulseSchedule::push(PulseSegment s) {
  if (!(s.duration_ns > 0.0)) throw InvalidInput("pulse segment duration must be positive");
  if (s.couplings.geometry().n_spins() != geometry.n_spins() ||
      s.couplings.geometry().bonds() != geometry.bonds()) {
    throw InvalidInput("pulse segment geometry differs from schedule geometry");
  }
  segments.push_back(std::move(s));
}

void PulseSchedule::append(const PulseSchedule& later) {
  for (const PulseSegment& s : later.segments) push(s);
}

double PulseSchedule::duration_ns() const {
  double t = 0.0;
  for (const PulseSegment& s : segments) t += s.duration_ns;
  return t;
}

Propagator::Propagator(const RMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  w_ = es.eigenvalues();
  v_ = es.eigenvectors().cast<cplx>();
}

Propagator::Propagator(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  w_ = es.eigenvalues();
  v_ = es.eigenvectors();
}

CMatrix Propagator::unitary(double t_ns) const {
  CVector phase(w_.size());
  for (Eigen::Index k = 0; k < w_.size(); ++k) phase(k) = std::polar(1.0, -kRadPerMHzNs * w_(k) * t_ns);
  return v_ * phase.asDiagonal() * v_.adjoint();
}

CVector Propagator::apply(const CVector& psi, double t_ns) const {
  CVector c = v_.adjoint() * psi;
  for (Eigen::Index k = 0; k < w_.size(); ++k) c(k) *= std::polar(1.0, -kRadPerMHzNs * w_(k) * t_ns);
  return v_ * c;
}

QuantumState::QuantumState(const SectorBasis& basis, CVector amps)
    : n_spins(basis.n_spins()), n_down(basis.n_down()), amplitudes(std::move(amps)) {
  if (amplitudes.size() != basis.size()) throw InvalidInput("state size does not match sector");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw InvalidInput("state is not normalised");
}

QuantumState evolve(const HermitianOperator& h, double t_ns, const QuantumState& psi) {
  if (h.dim() != psi.amplitudes.size()) throw InvalidInput("evolve: dimension mismatch");
  QuantumState out = psi;
  out.amplitudes = Propagator(h).apply(psi.amplitudes, t_ns);
  return out;
}

CMatrix schedule_unitary(const PulseSchedule& schedule, const NoiseRealization* noise) {
  const SectorBasis basis = SectorBasis::for_geometry(schedule.geometry);
  CMatrix u = CMatrix::Identity(basis.size(), basis.size());
  for (const PulseSegment& s : schedule.segments) {
    const CouplingSet c = noise ? apply_noise(s.couplings, *noise) : s.couplings;
    u = Propagator(build_sector_hamiltonian(basis, c)).unitary(s.duration_ns) * u;
  }
  return u;
}

QuantumState run_schedule(const PulseSchedule& schedule, const NoiseRealization& r, const QuantumState& psi0) {
  if (psi0.n_spins != schedule.geometry.n_spins()) throw InvalidInput("run_schedule: geometry mismatch");
  const SectorBasis basis = SectorBasis::for_geometry(schedule.geometry);
  QuantumState psi = psi0;
  for (const PulseSegment& s : schedule.segments) {
    psi.amplitudes = Propagator(build_sector_hamiltonian(basis, apply_noise(s.couplings, r)))
                         .apply(psi.amplitudes, s.duration_ns);
  }
  return psi;
}

CVector plus_state(const DeviceGeometry& geometry) {
  const RMatrix c = computational_columns(geometry);
  return ((c.col(0) + c.col(1)) / std::sqrt(2.0)).cast<cplx>();
}

double leakage(const CVector& psi, const RMatrix& comp) {
  const double inside = (comp.transpose().cast<cplx>() * psi).squaredNorm();
  return std::max(0.0, psi.squaredNorm() - inside);
}

CouplingSet idle_couplings(Encoding encoding, double j_idle_mhz) {
  const DeviceGeometry g = DeviceGeometry::for_encoding(encoding);
  if (encoding == Encoding::kEoLinear) return CouplingSet(g);
  return CouplingSet::uniform(g, j_idle_mhz);
}

namespace {

enum class IdleObservable { kCoherence, kLeakage };

Trajectory idle_trace(IdleObservable what, Encoding encoding, double j_idle_mhz, const NoiseSpec& spec,
                      int n_realizations, const std::vector<double>& times, std::uint64_t master_seed,
                      std::uint64_t salt, Exec exec) {
  if (encoding != Encoding::kSageT && encoding != Encoding::kTriageTriangle && encoding != Encoding::kEoLinear) {
    throw InvalidInput("idle traces support SAGE_T, TRIAGE_TRIANGLE and EO_LINEAR");
  }
  if (n_realizations < 1) throw InvalidInput("n_realizations must be >= 1");
  spec.validate();
  const CouplingSet base = idle_couplings(encoding, j_idle_mhz);
  const DeviceGeometry& g = base.geometry();
  const SectorBasis basis = SectorBasis::for_geometry(g);
  const RMatrix comp = computational_columns(g);
  const CVector psi0 = plus_state(g);
  const Propagator ideal(build_sector_hamiltonian(basis, base));
  const Eigen::Index n_t = static_cast<Eigen::Index>(times.size());

  // frame[i] = ideal idle evolution undone at time i, restricted to the qubit
  std::vector<CMatrix> frame(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    frame[i] = comp.transpose().cast<cplx>() * ideal.unitary(times[i]).adjoint();
  }

  // one column per realization, reduced in realization order afterwards
  CMatrix slots(n_t, n_realizations);
  auto member = [&](int k) {
    const NoiseRealization r = sample_realization(spec, g, static_cast<std::uint64_t>(k), master_seed, salt);
    const Propagator p(build_sector_hamiltonian(basis, apply_noise(base, r)));
    const CVector c = p.eigenvectors().adjoint() * psi0;
    CVector phased(c.size());
    for (Eigen::Index i = 0; i < n_t; ++i) {
      for (Eigen::Index m = 0; m < c.size(); ++m) {
        phased(m) = c(m) * std::polar(1.0, -kRadPerMHzNs * p.energies()(m) * times[static_cast<std::size_t>(i)]);
      }
      const CVector psi = p.eigenvectors() * phased;
      if (what == IdleObservable::kCoherence) {
        const CVector q = frame[static_cast<std::size_t>(i)] * psi;
        slots(i, k) = q(0) * std::conj(q(1));
      } else {
        slots(i, k) = leakage(psi, comp);
      }
    }
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int k = 0; k < n_realizations; ++k) member(k);
  } else {
    for (int k = 0; k < n_realizations; ++k) member(k);
  }

  Trajectory tr;
  tr.times_ns = times;
  tr.values.resize(times.size());
  for (Eigen::Index i = 0; i < n_t; ++i) {
    cplx acc = 0.0;
    for (int k = 0; k < n_realizations; ++k) acc += slots(i, k);
    acc /= static_cast<double>(n_realizations);
    tr.values[static_cast<std::size_t>(i)] = what == IdleObservable::kCoherence ? std::abs(acc) : acc.real();
  }
  return tr;
}

}  // namespace

Trajectory coherence_trace(Encoding encoding, double j_idle_mhz, const NoiseSpec& spec, int n_realizations,
                           const std::vector<double>& times_ns, std::uint64_t master_seed, std::uint64_t salt,
                           Exec exec) {
  return idle_trace(IdleObservable::kCoherence, encoding, j_idle_mhz, spec, n_realizations, times_ns, master_seed,
                    salt, exec);
}

Trajectory idle_leakage_trace(Encoding encoding, double j_idle_mhz, const NoiseSpec& spec, int n_realizations,
                              const std::vector<double>& times_ns, std::uint64_t master_seed, std::uint64_t salt,
                              Exec exec) {
  return idle_trace(IdleObservable::kLeakage, encoding, j_idle_mhz, spec, n_realizations, times_ns, master_seed,
                    salt, exec);
}

CVector embed_full(const SectorBasis& basis, const CVector& psi) {
  if (psi.size() != basis.size()) throw InvalidInput("embed_full: size mismatch");
  CVector full = CVector::Zero(Eigen::Index{1} << basis.n_spins());
  for (Eigen::Index k = 0; k < basis.size(); ++k) full(basis.states()[static_cast<std::size_t>(k)]) = psi(k);
  return full;
}

double entanglement_entropy(const SectorBasis& basis, const CVector& psi) {
  if (basis.n_spins() != 8) throw InvalidInput("entanglement_entropy expects an 8-spin state");
  const CVector full = embed_full(basis, psi);
  // spins 1-4 are the high nibble: row index
  CMatrix m(16, 16);
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) m(a, b) = full(16 * a + b);
  Eigen::JacobiSVD<CMatrix> svd(m);
  double s = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

}  // namespace sage
