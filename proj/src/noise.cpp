#include "sage/noise.hpp"

#include <cmath>

#include "sage/analysis.hpp"
#include "sage/dynamics.hpp"

namespace sage {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t salt, std::uint64_t stream_id) {
  return mix64(mix64(mix64(master_seed) ^ salt) ^ stream_id);
}

std::uint64_t CounterRng::next() { return mix64(key_ ^ mix64(++counter_)); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) throw InvalidInput("CounterRng::below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

void NoiseSpec::validate() const {
  if (!(delta_h_khz >= 0.0)) throw InvalidInput("delta_h must be non-negative");
  if (!(delta_j >= 0.0 && delta_j < 1.0)) throw InvalidInput("delta_J must lie in [0, 1)");
}

NoiseRealization sample_realization(const NoiseSpec& spec, const DeviceGeometry& geometry,
                                    std::uint64_t stream_id, std::uint64_t master_seed, std::uint64_t salt) {
  spec.validate();
  NoiseRealization r;
  r.seed_path = {master_seed, salt, stream_id};
  CounterRng rng(stream_key(master_seed, salt, stream_id));
  r.h_khz.resize(static_cast<std::size_t>(geometry.n_spins()));
  for (double& h : r.h_khz) h = rng.uniform(-spec.delta_h_khz, spec.delta_h_khz);
  for (const Bond& b : geometry.bonds()) r.eps[b] = rng.uniform(-spec.delta_j, spec.delta_j);
  return r;
}

CouplingSet apply_noise(const CouplingSet& base, const NoiseRealization& r) {
  const DeviceGeometry& g = base.geometry();
  if (r.h_khz.size() != static_cast<std::size_t>(g.n_spins())) {
    throw InvalidInput("noise realization does not match the geometry");
  }
  CouplingSet out = base;
  for (const auto& [bond, j] : base.exchanges()) {
    auto it = r.eps.find(bond);
    if (it == r.eps.end()) throw InvalidInput("noise realization lacks bond " + bond.label());
    out.set_exchange(bond, j * (1.0 + it->second));
  }
  for (int i = 0; i < g.n_spins(); ++i) {
    out.set_field(i, base.field(i) + r.h_khz[static_cast<std::size_t>(i)] * kMHzPerKHz);
  }
  return out;
}

namespace {

const DeviceGeometry& pair_geometry() {
  static const DeviceGeometry g(2, {{0, 1}}, Encoding::kCustom);
  return g;
}

}  // namespace

CalibrationResult calibrate_qeff(double delta_j, int n_realizations, std::uint64_t master_seed) {
  CalibrationResult out;
  out.n_realizations = n_realizations;
  if (!(delta_j > 0.0) || n_realizations < 1) {
    out.status = CalibrationStatus::kInvalid;
    return out;
  }
  // Work at J = 1 MHz; oscillation n is then t = n us. Extrema sit at
  // half-integer n; sample them up to the first envelope node.
  constexpr double kJ = 1.0;
  const double n_node = 1.0 / (2.0 * delta_j);
  std::vector<double> n_samples;
  for (double n = 0.5; n < 0.9 * n_node; n += 0.5) n_samples.push_back(n);
  if (n_samples.size() < 20) {
    const double step = 0.9 * n_node / 40.0;
    n_samples.clear();
    for (int i = 1; i <= 40; ++i) n_samples.push_back(i * step);
  }

  const NoiseSpec spec{0.0, delta_j};
  const SectorBasis basis(2, 1);
  const CouplingSet base = CouplingSet::uniform(pair_geometry(), kJ);
  const int ud = basis.index_of("ud");
  std::vector<double> contrast(n_samples.size(), 0.0);
  for (int k = 0; k < n_realizations; ++k) {
    const NoiseRealization r =
        sample_realization(spec, pair_geometry(), static_cast<std::uint64_t>(k), master_seed, hash_string("qeff"));
    const Propagator p(build_sector_hamiltonian(basis, apply_noise(base, r)));
    CVector psi = CVector::Zero(2);
    psi(ud) = 1.0;
    for (std::size_t i = 0; i < n_samples.size(); ++i) {
      const double prob = std::norm(p.apply(psi, n_samples[i] * 1000.0 / kJ)(ud));
      contrast[i] += 2.0 * prob - 1.0;
    }
  }
  for (double& c : contrast) c = std::abs(c / n_realizations);
  const FitResult f = fit_gaussian_envelope(n_samples, contrast);
  if (!f.ok()) {
    out.status = CalibrationStatus::kNoDecay;
    return out;
  }
  out.value = f.rate;
  return out;
}

CalibrationResult calibrate_t2eff(double delta_h_khz, int n_realizations, std::uint64_t master_seed) {
  CalibrationResult out;
  out.n_realizations = n_realizations;
  if (!(delta_h_khz > 0.0) || n_realizations < 1) {
    out.status = CalibrationStatus::kInvalid;
    return out;
  }
  const NoiseSpec spec{delta_h_khz, 0.0};
  const SectorBasis basis(2, 1);
  const CouplingSet base(pair_geometry());
  const int ud = basis.index_of("ud");
  const int du = basis.index_of("du");

  auto trace = [&](const std::vector<double>& times) {
    std::vector<cplx> acc(times.size(), 0.0);
    for (int k = 0; k < n_realizations; ++k) {
      const NoiseRealization r = sample_realization(spec, pair_geometry(), static_cast<std::uint64_t>(k),
                                                    master_seed, hash_string("t2eff"));
      const Propagator p(build_sector_hamiltonian(basis, apply_noise(base, r)));
      CVector psi = CVector::Zero(2);
      psi(ud) = 1.0 / std::sqrt(2.0);
      psi(du) = -1.0 / std::sqrt(2.0);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const CVector s = p.apply(psi, times[i]);
        acc[i] += s(ud) * std::conj(s(du));
      }
    }
    Trajectory tr;
    tr.times_ns = times;
    for (const cplx& a : acc) tr.values.push_back(std::abs(a) / n_realizations);
    return tr;
  };
  // scale-aware window: the analytic knee is ~0.13/δh
  const double guess_ns = 0.13 / (delta_h_khz * kMHzPerKHz) * 1000.0;
  const DecayMeasurement m = measure_gaussian_decay(trace, guess_ns * 1e-3, guess_ns * 20.0);
  if (!m.fit.ok()) {
    out.status = CalibrationStatus::kNoDecay;
    return out;
  }
  out.value = m.fit.rate;
  return out;
}

}  // namespace sage
