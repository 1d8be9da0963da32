#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sage/analysis.hpp"
#include "sage/gates.hpp"

using namespace sage;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd as2(const CMatrix& m) { return Eigen::Matrix2cd(m); }

CMatrix unitary_of(const PulseSegment& s, Encoding e) {
  PulseSchedule p(DeviceGeometry::for_encoding(e));
  p.push(s);
  return encoded_unitary(p);
}

}  // namespace

TEST_CASE("primitive names round-trip") {
  for (Primitive p : kAllPrimitives) CHECK(primitive_from_string(to_string(p)) == p);
  CHECK(primitive_from_string("S†") == Primitive::kSdg);
  CHECK_THROWS_AS(primitive_from_string("T"), InvalidInput);
}

TEST_CASE("X primitive: couplings, duration and unitary") {
  const PulseSegment s = primitive_pulse(Primitive::kX, 10.0, Encoding::kSageT);
  const double r3 = std::sqrt(3.0);
  CHECK(s.couplings.exchange(0, 1) == doctest::Approx(10.0 * (1 - 1 / (2 * r3))));
  CHECK(s.couplings.exchange(0, 2) == doctest::Approx(10.0 * (1 - 1 / r3)));
  CHECK(s.couplings.exchange(0, 3) == doctest::Approx(10.0));
  CHECK(s.duration_ns == doctest::Approx(100.0));
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  CHECK(phase_distance(unitary_of(s, Encoding::kSageT), x) < 1e-8);
}

TEST_CASE("duration is 2 phi / J0") {
  for (Primitive p : kAllPrimitives) {
    for (double j0 : {5.0, 10.0, 40.0}) {
      CHECK(primitive_pulse(p, j0, Encoding::kSageT).duration_ns ==
            doctest::Approx(2.0 * primitive_row(p).phi / j0 * 1000.0));
    }
  }
}

TEST_CASE("every primitive reaches its target on the full sector") {
  for (Encoding e : {Encoding::kSageT, Encoding::kTriageTriangle}) {
    for (Primitive p : kAllPrimitives) {
      const PulseSegment s = primitive_pulse(p, 10.0, e);
      const CMatrix u = unitary_of(s, e);
      CAPTURE(to_string(p));
      CHECK(average_gate_fidelity(u, primitive_target(p)) > 1.0 - 1e-8);
      CHECK(1.0 - (u.adjoint() * u).trace().real() / 2.0 < 1e-10);
      for (const auto& [b, j] : s.couplings.exchanges()) CHECK(j > 0.0);
    }
  }
}

TEST_CASE("H' is a pi rotation about (x - z)/sqrt2") {
  const Eigen::Matrix2cd u = as2(unitary_of(primitive_pulse(Primitive::kHp, 10.0, Encoding::kSageT), Encoding::kSageT));
  CHECK(phase_distance(u, rotation(Eigen::Vector3d(1, 0, -1).normalized(), kPi)) < 1e-8);
}

TEST_CASE("opposite rotations about x and z") {
  const Eigen::Vector3d x(1, 0, 0), z(0, 0, 1);
  for (double angle : {kPi / 2, -kPi / 2, kPi, -0.3}) {
    CHECK(phase_distance(unitary_of(opposite_rotation_pulse(1, 0, angle, 10.0), Encoding::kSageT), rotation(x, angle)) <
          1e-8);
  }
  const CMatrix sdg = unitary_of(primitive_pulse(Primitive::kSdg, 10.0, Encoding::kSageT), Encoding::kSageT);
  CHECK(phase_distance(unitary_of(opposite_rotation_pulse(0, 1, -kPi / 2, 10.0), Encoding::kSageT), sdg) < 1e-8);
  const PulseSegment id = opposite_rotation_pulse(1, 0, 0.0, 10.0);
  CHECK(id.couplings.exchange(0, 2) == id.couplings.exchange(0, 3));
  CHECK(opposite_rotation_pulse(1, 0, 1e-12, 10.0).duration_ns < 1e-9);
}

TEST_CASE("clifford group closes under multiplication") {
  const auto& g = clifford_group();
  REQUIRE(g.size() == 24);
  for (int a = 0; a < 24; ++a) {
    for (int b = 0; b < 24; ++b) {
      const int c = clifford_multiply(a, b);
      CHECK(phase_distance(g[a].target * g[b].target, g[c].target) < 1e-7);
    }
    CHECK(clifford_multiply(clifford_inverse(a), a) == 0);
  }
}

TEST_CASE("compiled cliffords reproduce their targets") {
  for (Encoding e : {Encoding::kSageT, Encoding::kTriageTriangle, Encoding::kEoLinear}) {
    const auto& sched = clifford_schedules(e, 10.0);
    std::vector<CMatrix> u;
    for (int k = 0; k < 24; ++k) {
      u.push_back(encoded_unitary(sched[k].schedule));
      CAPTURE(k);
      CHECK(phase_distance(u.back(), clifford_group()[k].target) < 1e-8);
      if (e != Encoding::kEoLinear) CHECK(sched[k].schedule.segments.size() <= 2);
    }
    for (int a = 0; a < 24; ++a) {
      for (int b = 0; b < 24; ++b) {
        CHECK(phase_distance(u[a] * u[b], u[clifford_multiply(a, b)]) < 1e-7);
      }
    }
  }
}

TEST_CASE("identity clifford is one uniform segment") {
  const auto& id = clifford_schedules(Encoding::kSageT, 10.0)[0].schedule;
  REQUIRE(id.segments.size() == 1);
  const auto& c = id.segments[0].couplings;
  CHECK(c.exchange(0, 1) == c.exchange(0, 2));
  CHECK(c.exchange(0, 1) == c.exchange(0, 3));
}

TEST_CASE("pi about (x+y)/sqrt2 is S X: X applied first") {
  int k = -1;
  for (const auto& c : clifford_group()) {
    if ((c.axis - Eigen::Vector3d(1, 1, 0).normalized()).norm() < 1e-12 && std::abs(c.angle - kPi) < 1e-12) k = c.index;
  }
  REQUIRE(k >= 0);
  const CompiledClifford& c = clifford_schedules(Encoding::kSageT, 10.0)[k];
  REQUIRE(c.gates.size() == 2);
  CHECK(c.gates[0] == "X");
  CHECK(c.gates[1] == "S");
}

TEST_CASE("EO compilation uses alternating nearest-neighbour pulses at J0") {
  for (const auto& c : clifford_schedules(Encoding::kEoLinear, 10.0)) {
    CHECK(c.schedule.segments.size() <= 4);
    for (const auto& s : c.schedule.segments) {
      const double j12 = s.couplings.exchange(0, 1), j23 = s.couplings.exchange(1, 2);
      CHECK((j12 == 0.0 || j23 == 0.0));
      CHECK(std::max(j12, j23) <= 10.0);
    }
  }
}
