#include "sage/spin_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace sage {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kSectorTol = 1e-10;

bool spin_down(std::uint32_t mask, int spin, int n) { return (mask >> (n - 1 - spin)) & 1U; }

std::uint32_t flip(std::uint32_t mask, int spin, int n) { return mask ^ (1U << (n - 1 - spin)); }

}  // namespace

std::string_view to_string(Encoding e) {
  switch (e) {
    case Encoding::kSageT: return "SAGE_T";
    case Encoding::kTriageTriangle: return "TRIAGE_TRIANGLE";
    case Encoding::kEoLinear: return "EO_LINEAR";
    case Encoding::kSagePair8Dot: return "SAGE_PAIR_8DOT";
    case Encoding::kBox4Dot: return "BOX_4DOT";
    case Encoding::kCustom: return "CUSTOM";
  }
  return "?";
}

Encoding encoding_from_string(std::string_view name) {
  for (Encoding e : {Encoding::kSageT, Encoding::kTriageTriangle, Encoding::kEoLinear,
                     Encoding::kSagePair8Dot, Encoding::kBox4Dot, Encoding::kCustom}) {
    if (to_string(e) == name) return e;
  }
  if (name == "SAGE") return Encoding::kSageT;
  if (name == "TRIAGE" || name == "TriAGE") return Encoding::kTriageTriangle;
  if (name == "EO") return Encoding::kEoLinear;
  throw InvalidInput("unknown encoding: " + std::string(name));
}

std::string Bond::label() const { return std::to_string(a + 1) + std::to_string(b + 1); }

Bond Bond::parse(std::string_view text) {
  std::string digits;
  for (char c : text) {
    if (c >= '1' && c <= '9') digits.push_back(c);
  }
  if (digits.size() != 2) throw InvalidInput("cannot parse bond label: " + std::string(text));
  return make_bond(digits[0] - '1', digits[1] - '1');
}

Bond make_bond(int spin_a, int spin_b) {
  if (spin_a == spin_b) throw InvalidInput("self-bond on spin " + std::to_string(spin_a + 1));
  return spin_a < spin_b ? Bond{spin_a, spin_b} : Bond{spin_b, spin_a};
}

DeviceGeometry::DeviceGeometry(int n_spins, std::vector<Bond> bonds, Encoding encoding)
    : n_spins_(n_spins), bonds_(std::move(bonds)), encoding_(encoding) {
  if (n_spins_ < 1 || n_spins_ > kMaxSpins) {
    throw InvalidInput("n_spins must lie in [1, " + std::to_string(kMaxSpins) + "]");
  }
  for (Bond& b : bonds_) {
    if (b.a == b.b) throw InvalidInput("self-bond in geometry");
    if (b.a > b.b) std::swap(b.a, b.b);
    if (b.a < 0 || b.b >= n_spins_) throw InvalidInput("bond index out of range: " + b.label());
  }
  std::vector<Bond> sorted = bonds_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInput("duplicate bond in geometry");
  }

  auto expect = [&](int n, std::vector<Bond> want) {
    std::sort(want.begin(), want.end());
    if (n_spins_ != n || sorted != want) {
      throw InvalidInput("bond set does not match encoding " + std::string(to_string(encoding_)));
    }
  };
  switch (encoding_) {
    case Encoding::kSageT: expect(4, {{0, 1}, {0, 2}, {0, 3}}); break;
    case Encoding::kTriageTriangle: expect(3, {{0, 1}, {0, 2}, {1, 2}}); break;
    case Encoding::kEoLinear: expect(3, {{0, 1}, {1, 2}}); break;
    case Encoding::kBox4Dot: expect(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); break;
    case Encoding::kSagePair8Dot: {
      if (n_spins_ != 8 || sorted.size() != 7) throw InvalidInput("SAGE_PAIR_8DOT needs 8 spins, 7 bonds");
      const std::vector<Bond> blocks{{0, 1}, {0, 2}, {0, 3}, {4, 5}, {4, 6}, {4, 7}};
      int inter = 0;
      for (const Bond& b : sorted) {
        if (std::find(blocks.begin(), blocks.end(), b) != blocks.end()) continue;
        if (!(b.a < 4 && b.b >= 4)) throw InvalidInput("SAGE_PAIR_8DOT extra bond must join the blocks");
        ++inter;
      }
      if (inter != 1) throw InvalidInput("SAGE_PAIR_8DOT needs exactly one interqubit bond");
      break;
    }
    case Encoding::kCustom: break;
  }
}

DeviceGeometry DeviceGeometry::sage_t() { return {4, {{0, 1}, {0, 2}, {0, 3}}, Encoding::kSageT}; }
DeviceGeometry DeviceGeometry::triage_triangle() {
  return {3, {{0, 1}, {0, 2}, {1, 2}}, Encoding::kTriageTriangle};
}
DeviceGeometry DeviceGeometry::eo_linear() { return {3, {{0, 1}, {1, 2}}, Encoding::kEoLinear}; }
DeviceGeometry DeviceGeometry::box_4dot() {
  return {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, Encoding::kBox4Dot};
}
DeviceGeometry DeviceGeometry::sage_pair_8dot(Bond interqubit) {
  return {8, {{0, 1}, {0, 2}, {0, 3}, {4, 5}, {4, 6}, {4, 7}, interqubit}, Encoding::kSagePair8Dot};
}
DeviceGeometry DeviceGeometry::chain(int n_spins) {
  std::vector<Bond> bonds;
  for (int i = 0; i + 1 < n_spins; ++i) bonds.push_back({i, i + 1});
  return {n_spins, std::move(bonds), Encoding::kCustom};
}
DeviceGeometry DeviceGeometry::for_encoding(Encoding e) {
  switch (e) {
    case Encoding::kSageT: return sage_t();
    case Encoding::kTriageTriangle: return triage_triangle();
    case Encoding::kEoLinear: return eo_linear();
    case Encoding::kBox4Dot: return box_4dot();
    case Encoding::kSagePair8Dot: return sage_pair_8dot();
    case Encoding::kCustom: break;
  }
  throw InvalidInput("no canonical geometry for CUSTOM");
}

bool DeviceGeometry::has_bond(Bond b) const {
  return std::find(bonds_.begin(), bonds_.end(), b) != bonds_.end();
}

int DeviceGeometry::computational_dim() const {
  return encoding_ == Encoding::kSagePair8Dot ? 4 : 2;
}

std::string DeviceGeometry::computational_labels() const {
  switch (encoding_) {
    case Encoding::kSageT:
    case Encoding::kBox4Dot:
      return "|0>=|S12 S34>, |1>=(|T0T0>-|T+T->-|T-T+>)/sqrt3 in S_z=0";
    case Encoding::kTriageTriangle:
    case Encoding::kEoLinear: return "|0>=|S12>|up>, |1>=(sqrt2|T+>|dn>-|T0>|up>)/sqrt3 in S_z=1/2";
    case Encoding::kSagePair8Dot: return "products of the 4-dot |0>,|1> on spins 1-4 and 5-8";
    case Encoding::kCustom: break;
  }
  return "none";
}

Bond DeviceGeometry::interqubit_bond() const {
  if (encoding_ != Encoding::kSagePair8Dot) throw InvalidInput("geometry has no interqubit bond");
  for (const Bond& b : bonds_) {
    if (b.a < 4 && b.b >= 4) return b;
  }
  throw InvalidInput("geometry has no interqubit bond");
}

CouplingSet::CouplingSet(DeviceGeometry geometry)
    : geometry_(std::move(geometry)), h_(static_cast<std::size_t>(geometry_.n_spins()), 0.0) {
  for (const Bond& b : geometry_.bonds()) j_[b] = 0.0;
}

CouplingSet CouplingSet::uniform(const DeviceGeometry& geometry, double j_mhz) {
  CouplingSet c(geometry);
  for (const Bond& b : geometry.bonds()) c.set_exchange(b, j_mhz);
  return c;
}

void CouplingSet::set_exchange(Bond b, double j_mhz) {
  auto it = j_.find(b);
  if (it == j_.end()) throw InvalidInput("bond " + b.label() + " not in geometry");
  if (!(j_mhz >= 0.0)) throw InvalidInput("exchange on " + b.label() + " must be non-negative");
  it->second = j_mhz;
}

double CouplingSet::exchange(Bond b) const {
  auto it = j_.find(b);
  return it == j_.end() ? 0.0 : it->second;
}

void CouplingSet::set_field(int site, double h_mhz) {
  if (site < 0 || site >= geometry_.n_spins()) throw InvalidInput("site out of range");
  h_[static_cast<std::size_t>(site)] = h_mhz;
}

double CouplingSet::field(int site) const { return h_.at(static_cast<std::size_t>(site)); }

double CouplingSet::max_coupling() const {
  double m = 0.0;
  for (const auto& [b, j] : j_) m = std::max(m, std::abs(j));
  for (double h : h_) m = std::max(m, std::abs(h));
  return m;
}

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidInput("Hermitian operator must be square");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw InvalidInput("operator is not Hermitian");
  }
}

bool HermitianOperator::is_real() const { return m_.imag().cwiseAbs().maxCoeff() == 0.0; }

SectorBasis::SectorBasis(int n_spins, int n_down) : n_spins_(n_spins), n_down_(n_down) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw InvalidInput("sector basis: too many spins");
  if (n_down < 0 || n_down > n_spins) throw InvalidInput("sector basis: bad n_down");
  const std::uint32_t full = 1U << n_spins;
  index_.assign(full, -1);
  for (std::uint32_t m = 0; m < full; ++m) {
    if (std::popcount(m) == n_down) {
      index_[m] = static_cast<int>(states_.size());
      states_.push_back(m);
    }
  }
}

SectorBasis SectorBasis::for_geometry(const DeviceGeometry& g) { return {g.n_spins(), g.sector_n_down()}; }

int SectorBasis::index_of(std::uint32_t mask) const {
  return mask < index_.size() ? index_[mask] : -1;
}

int SectorBasis::index_of(std::string_view spins) const {
  if (static_cast<int>(spins.size()) != n_spins_) throw InvalidInput("spin string length mismatch");
  std::uint32_t m = 0;
  for (char c : spins) m = (m << 1) | (c == 'd' ? 1U : 0U);
  return index_of(m);
}

HermitianOperator build_heisenberg(const DeviceGeometry& geometry, const CouplingSet& couplings) {
  const int n = geometry.n_spins();
  if (n > kMaxSpins) throw InvalidInput("dimension overflow: more than 12 spins");
  const std::uint32_t dim = 1U << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (std::uint32_t m = 0; m < dim; ++m) {
    double diag = 0.0;
    for (const auto& [bond, j] : couplings.exchanges()) {
      if (j == 0.0) continue;
      const bool aligned = spin_down(m, bond.a, n) == spin_down(m, bond.b, n);
      diag += 0.25 * j * (aligned ? 1.0 : -1.0);
      if (!aligned) h(flip(flip(m, bond.a, n), bond.b, n), m) += 0.5 * j;
    }
    for (int i = 0; i < n; ++i) diag -= couplings.field(i) * (spin_down(m, i, n) ? -1.0 : 1.0);
    h(m, m) += diag;
  }
  return HermitianOperator(std::move(h));
}

RMatrix build_sector_hamiltonian(const SectorBasis& basis, const CouplingSet& couplings) {
  const int n = basis.n_spins();
  if (couplings.geometry().n_spins() != n) throw InvalidInput("coupling set / sector size mismatch");
  const Eigen::Index d = basis.size();
  RMatrix h = RMatrix::Zero(d, d);
  const auto& states = basis.states();
  for (Eigen::Index k = 0; k < d; ++k) {
    const std::uint32_t m = states[static_cast<std::size_t>(k)];
    double diag = 0.0;
    for (const auto& [bond, j] : couplings.exchanges()) {
      if (j == 0.0) continue;
      const bool aligned = spin_down(m, bond.a, n) == spin_down(m, bond.b, n);
      diag += 0.25 * j * (aligned ? 1.0 : -1.0);
      if (!aligned) h(basis.index_of(flip(flip(m, bond.a, n), bond.b, n)), k) += 0.5 * j;
    }
    for (int i = 0; i < n; ++i) diag -= couplings.field(i) * (spin_down(m, i, n) ? -1.0 : 1.0);
    h(k, k) += diag;
  }
  return h;
}

HermitianOperator project_to_sector(const HermitianOperator& h, const SectorBasis& basis) {
  const int n = basis.n_spins();
  if (h.dim() != (Eigen::Index{1} << n)) throw InvalidInput("operator size does not match 2^n");
  const CMatrix& m = h.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const int down_c = std::popcount(static_cast<std::uint32_t>(c));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::popcount(static_cast<std::uint32_t>(r)) != down_c && std::abs(m(r, c)) > kSectorTol * scale) {
        throw InvalidInput("operator mixes S_z sectors");
      }
    }
  }
  const Eigen::Index d = basis.size();
  CMatrix block(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      block(i, j) = m(basis.states()[static_cast<std::size_t>(i)], basis.states()[static_cast<std::size_t>(j)]);
    }
  }
  return HermitianOperator(std::move(block));
}

RMatrix labeled_eigenbasis_4dot() {
  const SectorBasis basis(4, 2);
  RMatrix v = RMatrix::Zero(6, 6);
  auto put = [&](int col, std::string_view s, double amp) { v(basis.index_of(s), col) += amp; };
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r6 = std::sqrt(6.0);

  put(0, "udud", 0.5); put(0, "uddu", -0.5); put(0, "duud", -0.5); put(0, "dudu", 0.5);

  put(1, "uudd", 1.0 / r3); put(1, "dduu", 1.0 / r3);
  for (auto s : {"udud", "uddu", "duud", "dudu"}) put(1, s, -0.5 / r3);

  put(2, "udud", 0.5); put(2, "uddu", 0.5); put(2, "duud", -0.5); put(2, "dudu", -0.5);
  put(3, "udud", 0.5); put(3, "uddu", -0.5); put(3, "duud", 0.5); put(3, "dudu", -0.5);
  put(4, "uudd", 1.0 / r2); put(4, "dduu", -1.0 / r2);
  for (auto s : {"uudd", "udud", "uddu", "duud", "dudu", "dduu"}) put(5, s, 1.0 / r6);
  return v;
}

RMatrix labeled_eigenbasis_3dot() {
  const SectorBasis basis(3, 1);
  RMatrix v = RMatrix::Zero(3, 3);
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const int uud = basis.index_of("uud");
  const int udu = basis.index_of("udu");
  const int duu = basis.index_of("duu");
  // |0> = |S>|u>
  v(udu, 0) = 1.0 / r2;
  v(duu, 0) = -1.0 / r2;
  // |1> = (sqrt2 |T+>|d> - |T0>|u>) / sqrt3
  v(uud, 1) = r2 / r3;
  v(udu, 1) = -1.0 / (r2 * r3);
  v(duu, 1) = -1.0 / (r2 * r3);
  // |L> = (|T+>|d> + sqrt2 |T0>|u>) / sqrt3
  v(uud, 2) = 1.0 / r3;
  v(udu, 2) = 1.0 / r3;
  v(duu, 2) = 1.0 / r3;
  return v;
}

RMatrix labeled_eigenbasis(const DeviceGeometry& geometry) {
  switch (geometry.n_spins()) {
    case 4: return labeled_eigenbasis_4dot();
    case 3: return labeled_eigenbasis_3dot();
    default: throw InvalidInput("labeled basis exists for 3- and 4-spin devices only");
  }
}

RMatrix computational_columns(const DeviceGeometry& geometry) {
  if (geometry.n_spins() != 8) return labeled_eigenbasis(geometry).leftCols(2);
  const SectorBasis four(4, 2);
  const SectorBasis eight(8, 4);
  const RMatrix single = labeled_eigenbasis_4dot().leftCols(2);
  RMatrix c = RMatrix::Zero(eight.size(), 4);
  for (int qa = 0; qa < 2; ++qa) {
    for (int qb = 0; qb < 2; ++qb) {
      for (Eigen::Index i = 0; i < four.size(); ++i) {
        for (Eigen::Index j = 0; j < four.size(); ++j) {
          const double amp = single(i, qa) * single(j, qb);
          if (amp == 0.0) continue;
          const std::uint32_t mask = (four.states()[static_cast<std::size_t>(i)] << 4) |
                                     four.states()[static_cast<std::size_t>(j)];
          c(eight.index_of(mask), 2 * qa + qb) += amp;
        }
      }
    }
  }
  return c;
}

HermitianOperator reference_matrix_4dot(const CouplingSet& couplings) {
  if (couplings.geometry().n_spins() != 4) throw InvalidInput("reference_matrix_4dot needs 4 spins");
  auto j = [&](int a, int b) { return couplings.exchange(a - 1, b - 1); };
  auto d = [&](int a, int b) { return couplings.field(a - 1) - couplings.field(b - 1); };
  const double ja = j(1, 2) + j(3, 4);
  const double jb = j(1, 3) + j(2, 4);
  const double jc = j(1, 4) + j(2, 3);
  const double jda = j(1, 2) - j(3, 4);
  const double jdb = j(1, 3) - j(2, 4);
  const double jdc = j(1, 4) - j(2, 3);
  const double d12 = d(1, 2);
  const double d34 = d(3, 4);
  const double d13_24 = d(1, 3) + d(2, 4);
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r23 = std::sqrt(2.0 / 3.0);

  RMatrix m(6, 6);
  m << -0.75 * ja, r3 / 4 * (jc - jb), -d34, -d12, 0.0, 0.0,
       r3 / 4 * (jc - jb), 0.25 * (ja - 2 * (jb + jc)), d12 / r3, d34 / r3, -r23 * d13_24, 0.0,
       -d34, d12 / r3, -0.25 * (ja + 2 * jda), 0.25 * (jb - jc), -r2 / 4 * (jdb + jdc), -r23 * d12,
       -d12, d34 / r3, 0.25 * (jb - jc), 0.25 * (2 * jda - ja), r2 / 4 * (jdb - jdc), -r23 * d34,
       0.0, -r23 * d13_24, -r2 / 4 * (jdb + jdc), r2 / 4 * (jdb - jdc), 0.25 * (ja - jb - jc), -d13_24 / r3,
       0.0, 0.0, -r23 * d12, -r23 * d34, -d13_24 / r3, 0.25 * (ja + jb + jc);
  return HermitianOperator(m.cast<cplx>());
}

HermitianOperator reference_matrix_3dot(const CouplingSet& couplings) {
  if (couplings.geometry().n_spins() != 3) throw InvalidInput("reference_matrix_3dot needs 3 spins");
  auto j = [&](int a, int b) { return couplings.exchange(a - 1, b - 1); };
  auto d = [&](int a, int b) { return couplings.field(a - 1) - couplings.field(b - 1); };
  const double j12 = j(1, 2);
  const double j13 = j(1, 3);
  const double j23 = j(2, 3);
  const double d12 = d(1, 2);
  const double dsum = d(1, 3) + d(2, 3);
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r6 = std::sqrt(6.0);
  const double off = r3 * (d12 - 0.75 * j13 + 0.75 * j23);

  RMatrix m(3, 3);
  m << dsum - 2.25 * j12, off, -r6 * d12,
       off, -dsum + 0.75 * j12 - 1.5 * (j13 + j23), -r2 * dsum,
       -r6 * d12, -r2 * dsum, 0.75 * (j12 + j13 + j23);
  m /= 3.0;
  return HermitianOperator(m.cast<cplx>());
}

Eigen::Matrix2cd PauliCoefficients::matrix() const {
  Eigen::Matrix2cd m;
  m << identity + z, cplx(x, -y), cplx(x, y), identity - z;
  return m;
}

double PauliCoefficients::norm() const { return std::sqrt(x * x + y * y + z * z); }

PauliCoefficients PauliCoefficients::from_matrix(const Eigen::Matrix2cd& m) {
  return {0.5 * (m(0, 0) + m(1, 1)).real(), 0.5 * (m(0, 1) + m(1, 0)).real(),
          0.5 * (m(1, 0) - m(0, 1)).imag(), 0.5 * (m(0, 0) - m(1, 1)).real()};
}

PauliCoefficients sage_qubit_hamiltonian(double j12, double j13, double j14) {
  if (j12 < 0 || j13 < 0 || j14 < 0) throw InvalidInput("SAGE couplings must be non-negative");
  const double r3 = std::sqrt(3.0);
  PauliCoefficients p;
  p.x = j14 / 4 * r3 - j13 / 4 * r3;
  p.z = j14 / 4 + j13 / 4 - j12 / 2;
  return p;
}

SpectralReport spectral_report(const HermitianOperator& h_labeled, int computational_dim,
                               double coupling_scale) {
  const Eigen::Index d = h_labeled.dim();
  if (computational_dim < 1 || computational_dim >= d) throw InvalidInput("bad computational dimension");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h_labeled.matrix());
  const RVector& w = es.eigenvalues();
  std::vector<double> weight(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    weight[static_cast<std::size_t>(k)] = es.eigenvectors().col(k).head(computational_dim).squaredNorm();
  }
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return weight[a] > weight[b]; });
  std::vector<int> comp(order.begin(), order.begin() + computational_dim);
  std::sort(comp.begin(), comp.end());

  SpectralReport r;
  r.energies.assign(w.data(), w.data() + d);
  r.computational_indices = comp;
  double lo = w(comp.front());
  double hi = w(comp.back());
  r.qubit_splitting = hi - lo;
  r.min_gap_to_leakage = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::find(comp.begin(), comp.end(), static_cast<int>(k)) != comp.end()) continue;
    for (int c : comp) r.min_gap_to_leakage = std::min(r.min_gap_to_leakage, std::abs(w(k) - w(c)));
  }
  r.leakage_hotspot = r.min_gap_to_leakage < 1e-6 * coupling_scale;
  return r;
}

SpectralReport spectral_report(const CouplingSet& couplings) {
  const DeviceGeometry& g = couplings.geometry();
  const SectorBasis basis = SectorBasis::for_geometry(g);
  const RMatrix v = labeled_eigenbasis(g);
  const RMatrix h = v.transpose() * build_sector_hamiltonian(basis, couplings) * v;
  return spectral_report(HermitianOperator(h.cast<cplx>()), 2, couplings.max_coupling());
}

}  // namespace sage
