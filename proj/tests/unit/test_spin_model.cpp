#include "doctest.h"

#include <cmath>
#include <random>

#include "sage/spin_model.hpp"

using namespace sage;

namespace {

RVector sorted_eigs(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
  return es.eigenvalues();
}

void check_eigs(const RVector& got, std::initializer_list<double> want, double tol = 1e-9) {
  REQUIRE(got.size() == static_cast<Eigen::Index>(want.size()));
  Eigen::Index k = 0;
  for (double w : want) CHECK(got(k++) == doctest::Approx(w).epsilon(tol));
}

}  // namespace

TEST_CASE("bond labels and parsing") {
  CHECK(Bond{1, 5}.label() == "26");
  CHECK(Bond::parse("26") == Bond{1, 5});
  CHECK(make_bond(3, 0) == Bond{0, 3});
  CHECK_THROWS_AS(make_bond(2, 2), InvalidInput);
}

TEST_CASE("geometries carry the expected bonds") {
  CHECK(DeviceGeometry::sage_t().bonds().size() == 3);
  CHECK(DeviceGeometry::triage_triangle().has_bond({1, 2}));
  CHECK_FALSE(DeviceGeometry::eo_linear().has_bond({0, 2}));
  CHECK(DeviceGeometry::box_4dot().bonds().size() == 6);
  const auto pair = DeviceGeometry::sage_pair_8dot();
  CHECK(pair.n_spins() == 8);
  CHECK(pair.interqubit_bond() == Bond{1, 5});
  CHECK_THROWS_AS(DeviceGeometry::sage_pair_8dot(Bond{1, 2}), InvalidInput);
}

TEST_CASE("coupling set rejects foreign bonds and negative exchange") {
  CouplingSet c(DeviceGeometry::sage_t());
  CHECK_THROWS_AS(c.set_exchange({1, 2}, 1.0), InvalidInput);
  CHECK_THROWS_AS(c.set_exchange({0, 1}, -1.0), InvalidInput);
  CHECK(c.exchange(1, 2) == 0.0);
}

TEST_CASE("two spins: zero couplings give the zero matrix") {
  const auto g = DeviceGeometry::chain(2);
  CHECK(build_heisenberg(g, CouplingSet(g)).matrix().norm() == 0.0);
}

TEST_CASE("two spins: singlet at -3J/4, triplet at +J/4") {
  const auto g = DeviceGeometry::chain(2);
  const HermitianOperator h = build_heisenberg(g, CouplingSet::uniform(g, 10.0));
  check_eigs(sorted_eigs(h.matrix().real()), {-7.5, 2.5, 2.5, 2.5});
}

TEST_CASE("sector spectra match an independent dense construction") {
  SUBCASE("SAGE_T with fields") {
    const auto g = DeviceGeometry::sage_t();
    CouplingSet c(g);
    c.set_exchange({0, 1}, 3.1);
    c.set_exchange({0, 2}, 7.2);
    c.set_exchange({0, 3}, 5.5);
    const double h[] = {0.11, -0.05, 0.02, 0.07};
    for (int i = 0; i < 4; ++i) c.set_field(i, h[i]);
    const RMatrix m = build_sector_hamiltonian(SectorBasis::for_geometry(g), c);
    check_eigs(sorted_eigs(m), {-6.929426327869, -5.72746042004, -2.173185342896, 0.839390901649, 2.133491481735,
                                3.957189707421});
  }
  SUBCASE("EO_LINEAR with fields") {
    const auto g = DeviceGeometry::eo_linear();
    CouplingSet c(g);
    c.set_exchange({0, 1}, 4.0);
    c.set_exchange({1, 2}, 9.0);
    const double h[] = {0.2, -0.1, 0.05};
    for (int i = 0; i < 3; ++i) c.set_field(i, h[i]);
    check_eigs(sorted_eigs(build_sector_hamiltonian(SectorBasis::for_geometry(g), c)),
               {-7.380652225629, 0.764932981282, 3.215719244347});
  }
  SUBCASE("TRIAGE_TRIANGLE with fields") {
    const auto g = DeviceGeometry::triage_triangle();
    CouplingSet c(g);
    c.set_exchange({0, 1}, 4.0);
    c.set_exchange({0, 2}, 6.0);
    c.set_exchange({1, 2}, 9.0);
    const double h[] = {0.2, -0.1, 0.05};
    for (int i = 0; i < 3; ++i) c.set_field(i, h[i]);
    check_eigs(sorted_eigs(build_sector_hamiltonian(SectorBasis::for_geometry(g), c)),
               {-7.087517439019, -2.52041340413, 4.707930843149});
  }
}

TEST_CASE("sector dimensions") {
  auto dim = [](const DeviceGeometry& g) { return SectorBasis::for_geometry(g).size(); };
  CHECK(dim(DeviceGeometry::sage_t()) == 6);
  CHECK(dim(DeviceGeometry::eo_linear()) == 3);
  CHECK(dim(DeviceGeometry::sage_pair_8dot()) == 70);
}

TEST_CASE("projection of the full operator equals the direct sector build") {
  const auto g = DeviceGeometry::sage_t();
  CouplingSet c = CouplingSet::uniform(g, 4.0);
  c.set_field(2, 0.3);
  const SectorBasis b = SectorBasis::for_geometry(g);
  const HermitianOperator p = project_to_sector(build_heisenberg(g, c), b);
  CHECK((p.matrix().real() - build_sector_hamiltonian(b, c)).norm() < 1e-12);
}

TEST_CASE("SAGE_T uniform coupling: qubit block is diagonal at -3J/4 and decoupled") {
  const auto g = DeviceGeometry::sage_t();
  const double j = 8.0;
  const HermitianOperator r = reference_matrix_4dot(CouplingSet::uniform(g, j));
  CHECK(r.matrix()(0, 0).real() == doctest::Approx(-0.75 * j));
  CHECK(r.matrix()(1, 1).real() == doctest::Approx(-0.75 * j));
  RMatrix off = r.matrix().real().topRows(2);
  off(0, 0) = off(1, 1) = 0.0;
  CHECK(off.norm() < 1e-12);
  CHECK(reference_matrix_4dot(CouplingSet(g)).matrix().norm() == 0.0);
}

TEST_CASE("closed forms agree with brute force for random couplings") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uj(0.0, 10.0), uh(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g4 = DeviceGeometry::box_4dot();
    CouplingSet c4(g4);
    for (const Bond& b : g4.bonds()) c4.set_exchange(b, uj(rng));
    for (int i = 0; i < 4; ++i) c4.set_field(i, uh(rng));
    const RMatrix v4 = labeled_eigenbasis_4dot();
    const RMatrix brute4 = v4.transpose() * build_sector_hamiltonian(SectorBasis::for_geometry(g4), c4) * v4;
    CHECK((brute4 - reference_matrix_4dot(c4).matrix().real()).cwiseAbs().maxCoeff() < 1e-10);

    const auto g3 = DeviceGeometry::triage_triangle();
    CouplingSet c3(g3);
    for (const Bond& b : g3.bonds()) c3.set_exchange(b, uj(rng));
    double hsum = 0.0;
    for (int i = 0; i < 3; ++i) {
      c3.set_field(i, uh(rng));
      hsum += c3.field(i);
    }
    const RMatrix v3 = labeled_eigenbasis_3dot();
    const RMatrix brute3 = v3.transpose() * build_sector_hamiltonian(SectorBasis::for_geometry(g3), c3) * v3;
    const RMatrix ref3 = reference_matrix_3dot(c3).matrix().real() - hsum / 3.0 * RMatrix::Identity(3, 3);
    CHECK((brute3 - ref3).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("three-dot closed form: gradient couples |1> to the leakage state") {
  const auto g = DeviceGeometry::triage_triangle();
  CouplingSet c(g);
  const double d = 0.2;
  c.set_field(0, d);
  c.set_field(1, d);
  const RMatrix m = reference_matrix_3dot(c).matrix().real();
  // Δ13 = Δ23 = d
  CHECK(std::abs(m(1, 2)) == doctest::Approx(std::sqrt(2.0) * 2.0 * d / 3.0));
}

TEST_CASE("qubit Hamiltonian from the three SAGE couplings") {
  const PauliCoefficients u = sage_qubit_hamiltonian(5.0, 5.0, 5.0);
  CHECK(std::abs(u.x) < 1e-12);
  CHECK(std::abs(u.z) < 1e-12);
  const double r3 = std::sqrt(3.0);
  const double j0 = 10.0;
  const PauliCoefficients x = sage_qubit_hamiltonian(j0 * (1 - 1 / (2 * r3)), j0 * (1 - 1 / r3), j0);
  CHECK(std::abs(x.x) == doctest::Approx(j0 / 4));
  CHECK(std::abs(x.z) < 1e-12);
  const double delta = 1.3;
  const PauliCoefficients s = sage_qubit_hamiltonian(6.0, 6.0 - delta, 6.0 + delta);
  CHECK(std::abs(s.z) < 1e-12);
  CHECK(std::abs(s.x) == doctest::Approx(r3 * delta / 2));
}

TEST_CASE("spectral report: SAGE_T gap J/2 and gapless qubit") {
  const double j = 7.0;
  const SpectralReport r = spectral_report(CouplingSet::uniform(DeviceGeometry::sage_t(), j));
  CHECK(r.qubit_splitting < 1e-9 * j);
  CHECK(r.min_gap_to_leakage == doctest::Approx(j / 2).epsilon(1e-9));
  CHECK_FALSE(r.leakage_hotspot);
}

TEST_CASE("spectral report: box with equal bonds, gap half of J_a") {
  // J_a = J_12 + J_34
  const double ja = 6.0;
  const SpectralReport r = spectral_report(CouplingSet::uniform(DeviceGeometry::box_4dot(), ja / 2));
  CHECK(r.qubit_splitting < 1e-9);
  CHECK(r.min_gap_to_leakage == doctest::Approx(ja / 2).epsilon(1e-9));
}

TEST_CASE("spectral report: 4-dot chain has a leakage hotspot") {
  const auto g = DeviceGeometry::chain(4);
  bool found = false;
  for (double j2 = 0.05; j2 < 3.0 && !found; j2 += 0.001) {
    CouplingSet c(g);
    c.set_exchange({0, 1}, 1.0);
    c.set_exchange({1, 2}, j2);
    c.set_exchange({2, 3}, 1.0);
    const RMatrix v = labeled_eigenbasis_4dot();
    const RMatrix h = v.transpose() * build_sector_hamiltonian(SectorBasis::for_geometry(g), c) * v;
    const SpectralReport r = spectral_report(HermitianOperator(h.cast<cplx>()), 2, 1.0);
    if (r.min_gap_to_leakage < 2e-3) found = true;
  }
  CHECK(found);
}

TEST_CASE("computational columns are orthonormal singlets") {
  for (const auto& g : {DeviceGeometry::sage_t(), DeviceGeometry::eo_linear(), DeviceGeometry::sage_pair_8dot()}) {
    const RMatrix c = computational_columns(g);
    CHECK((c.transpose() * c - RMatrix::Identity(c.cols(), c.cols())).norm() < 1e-12);
  }
}
