#include "sage/two_qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sage {
namespace {

constexpr double kGolden = 0.6180339887498949;

template <typename F>
double golden_max(F f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Matrix4c as4(const CMatrix& m) { return Matrix4c(m); }

// Lift two 4-dot SAGE coupling sets onto the two blocks of an 8-dot pair.
CouplingSet combine(const DeviceGeometry& g, const CouplingSet& a, const CouplingSet& b, double jc) {
  CouplingSet c(g);
  for (const auto& [bond, j] : a.exchanges()) c.set_exchange(bond, j);
  for (const auto& [bond, j] : b.exchanges()) c.set_exchange({bond.a + 4, bond.b + 4}, j);
  c.set_exchange(g.interqubit_bond(), jc);
  return c;
}

}  // namespace

CouplingSet pair_couplings(const DeviceGeometry& geometry, double j0_mhz, double jc_mhz) {
  if (geometry.encoding() != Encoding::kSagePair8Dot) throw InvalidInput("pair_couplings needs SAGE_PAIR_8DOT");
  CouplingSet c = CouplingSet::uniform(geometry, j0_mhz);
  c.set_exchange(geometry.interqubit_bond(), jc_mhz);
  return c;
}

double cnot_time_estimate_ns(double j0_mhz, double jc_mhz) {
  return (3.0 * j0_mhz / (4.0 * jc_mhz * jc_mhz) - 45.0 / (64.0 * jc_mhz)) * 1000.0;
}

double theta_estimate(double j0_mhz, double jc_mhz) { return 3.0 / 8.0 + 9.0 * jc_mhz / (128.0 * j0_mhz); }

InteractionPropagator::InteractionPropagator(const DeviceGeometry& geometry, double j0_mhz, double jc_mhz)
    : basis_(SectorBasis::for_geometry(geometry)),
      comp_(computational_columns(geometry)),
      prop_(build_sector_hamiltonian(basis_, pair_couplings(geometry, j0_mhz, jc_mhz))),
      a_(comp_.transpose().cast<cplx>() * prop_.eigenvectors()) {}

Matrix4c InteractionPropagator::block(double t_ns) const {
  CVector phase(prop_.dim());
  for (Eigen::Index k = 0; k < prop_.dim(); ++k) {
    phase(k) = std::polar(1.0, -kRadPerMHzNs * prop_.energies()(k) * t_ns);
  }
  return as4(a_ * phase.asDiagonal() * a_.adjoint());
}

CVector InteractionPropagator::apply(const CVector& psi, double t_ns) const { return prop_.apply(psi, t_ns); }

Matrix4c cnot_circuit(const Matrix4c& m, double theta) {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const double half = std::numbers::pi * theta / 2.0;
  const cplx o0 = std::polar(1.0, half);
  const cplx o1 = std::polar(1.0, -half);
  Matrix4c ih = Matrix4c::Zero();
  ih.block<2, 2>(0, 0) = h;
  ih.block<2, 2>(2, 2) = h;
  Matrix4c oo = Matrix4c::Zero();
  oo.diagonal() << o0 * o0, o0 * o1, o1 * o0, o1 * o1;
  return ih * oo * m * ih;
}

std::vector<DeviationPoint> deviation_scan(const InteractionPropagator& p, const std::vector<double>& times_ns) {
  std::vector<DeviationPoint> out(times_ns.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < times_ns.size(); ++i) {
    const Matrix4c m = p.block(times_ns[i]);
    out[i] = {times_ns[i], cnot_deviation(as4(polar_unitary(m))),
              1.0 - (m.adjoint() * m).trace().real() / 4.0};
  }
  return out;
}

namespace {

PulseSchedule build_circuit(const DeviceGeometry& g, double j0, double jc, double t_int, double theta) {
  const CouplingSet idle = CouplingSet::uniform(DeviceGeometry::sage_t(), j0);
  const PulseSegment had = primitive_pulse(Primitive::kH, j0, Encoding::kSageT);
  const PulseSegment z = opposite_rotation_pulse(0.0, 1.0, -std::numbers::pi * theta, j0);

  PulseSchedule s(g, "CNOT");
  s.push({combine(g, idle, had.couplings, 0.0), had.duration_ns});
  s.push({pair_couplings(g, j0, jc), t_int});
  s.push({combine(g, z.couplings, z.couplings, 0.0), z.duration_ns});
  s.push({combine(g, idle, had.couplings, 0.0), had.duration_ns});
  return s;
}

}  // namespace

CnotResult cnot_schedule(double j0_mhz, double jc_mhz, const DeviceGeometry& geometry) {
  if (geometry.encoding() != Encoding::kSagePair8Dot) throw InvalidInput("cnot_schedule needs SAGE_PAIR_8DOT");
  if (!(j0_mhz > 0.0) || !(jc_mhz > 0.0)) throw InvalidInput("cnot_schedule: couplings must be positive");
  if (jc_mhz >= 0.5 * j0_mhz) throw InvalidInput("cnot_schedule: J_c must stay below J_0/2");

  const InteractionPropagator p(geometry, j0_mhz, jc_mhz);
  CnotResult r{PulseSchedule(geometry)};
  r.j0_mhz = j0_mhz;
  r.jc_mhz = jc_mhz;
  r.t_estimate_ns = cnot_time_estimate_ns(j0_mhz, jc_mhz);
  r.theta_guess = theta_estimate(j0_mhz, jc_mhz);

  const double dt = 1000.0 / (16.0 * j0_mhz);
  std::vector<double> grid;
  for (double t = 0.5 * r.t_estimate_ns; t <= 1.5 * r.t_estimate_ns; t += dt) grid.push_back(t);
  const std::vector<DeviationPoint> scan = deviation_scan(p, grid);

  auto deviation_at = [&](double t) { return cnot_deviation(as4(polar_unitary(p.block(t)))); };
  const auto kmin = static_cast<std::size_t>(
      std::min_element(scan.begin(), scan.end(), [](auto& a, auto& b) { return a.deviation < b.deviation; }) -
      scan.begin());
  r.t_makhlin_ns = golden_max([&](double t) { return -deviation_at(t); }, scan[kmin].t_ns - dt,
                              scan[kmin].t_ns + dt, 1e-6);
  r.makhlin_min = deviation_at(r.t_makhlin_ns);

  const double threshold = std::max(0.01, 2.0 * scan[kmin].deviation);
  std::size_t lo = kmin;
  std::size_t hi = kmin;
  while (lo > 0 && scan[lo - 1].deviation < threshold) --lo;
  while (hi + 1 < scan.size() && scan[hi + 1].deviation < threshold) ++hi;

  const double th_lo = r.theta_guess - 0.05;
  const double th_hi = r.theta_guess + 0.05;
  auto fidelity = [&](double t, double theta) {
    return average_gate_fidelity(cnot_circuit(p.block(t), theta), cnot_matrix());
  };
  auto best_theta = [&](double t) {
    return golden_max([&](double th) { return fidelity(t, th); }, th_lo, th_hi, 1e-9);
  };
  auto best_fidelity = [&](double t) { return fidelity(t, best_theta(t)); };

  std::size_t kbest = lo;
  double fbest = -1.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const double f = best_fidelity(scan[k].t_ns);
    if (f > fbest) {
      fbest = f;
      kbest = k;
    }
  }
  r.t_cnot_ns = golden_max(best_fidelity, scan[kbest].t_ns - dt, scan[kbest].t_ns + dt, 1e-6);
  r.theta = best_theta(r.t_cnot_ns);

  r.schedule = build_circuit(geometry, j0_mhz, jc_mhz, r.t_cnot_ns, r.theta);
  const CMatrix u = encoded_unitary(r.schedule);
  r.fidelity = average_gate_fidelity(u, cnot_matrix());
  r.leakage = 1.0 - (u.adjoint() * u).trace().real() / 4.0;
  for (double t = 0.0; t <= r.t_cnot_ns; t += dt) {
    const Matrix4c m = p.block(t);
    r.max_inpulse_leakage = std::max(r.max_inpulse_leakage, 1.0 - (m.adjoint() * m).trace().real() / 4.0);
  }
  return r;
}

Trajectory entropy_trace(const InteractionPropagator& p, const std::vector<double>& times_ns) {
  const CVector psi0 = (p.comp() * Eigen::Vector4d::Constant(0.5)).cast<cplx>();
  Trajectory tr;
  tr.times_ns = times_ns;
  tr.values.resize(times_ns.size());
  for (std::size_t i = 0; i < times_ns.size(); ++i) {
    tr.values[i] = entanglement_entropy(p.basis(), p.apply(psi0, times_ns[i]));
  }
  return tr;
}

NoisyGateStats noisy_cnot(const CnotResult& cnot, const NoiseSpec& spec, int n_realizations,
                          std::uint64_t master_seed, std::uint64_t salt, Exec exec) {
  if (n_realizations < 1) throw InvalidInput("n_realizations must be >= 1");
  spec.validate();
  const RMatrix comp = computational_columns(cnot.schedule.geometry);
  std::vector<double> f(static_cast<std::size_t>(n_realizations));
  std::vector<double> l(static_cast<std::size_t>(n_realizations));
  auto member = [&](int k) {
    const NoiseRealization r =
        sample_realization(spec, cnot.schedule.geometry, static_cast<std::uint64_t>(k), master_seed, salt);
    const CMatrix u = encoded_unitary(cnot.schedule, &r);
    f[static_cast<std::size_t>(k)] = average_gate_fidelity(u, cnot_matrix());
    l[static_cast<std::size_t>(k)] = 1.0 - (u.adjoint() * u).trace().real() / 4.0;
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_realizations; ++k) member(k);
  } else {
    for (int k = 0; k < n_realizations; ++k) member(k);
  }
  NoisyGateStats s;
  for (int k = 0; k < n_realizations; ++k) {
    s.fidelity += f[static_cast<std::size_t>(k)];
    s.leakage += l[static_cast<std::size_t>(k)];
  }
  s.fidelity /= n_realizations;
  s.leakage /= n_realizations;
  double var = 0.0;
  for (double x : f) var += (x - s.fidelity) * (x - s.fidelity);
  s.fidelity_stderr = n_realizations > 1 ? std::sqrt(var / (n_realizations - 1) / n_realizations) : 0.0;
  return s;
}

}  // namespace sage
