#include "sage/gates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "sage/analysis.hpp"

namespace sage {

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::kI: return "I";
    case Primitive::kX: return "X";
    case Primitive::kZ: return "Z";
    case Primitive::kS: return "S";
    case Primitive::kSdg: return "Sdg";
    case Primitive::kSqrtX: return "SqrtX";
    case Primitive::kSqrtXdg: return "SqrtXdg";
    case Primitive::kH: return "H";
    case Primitive::kHp: return "Hp";
  }
  return "?";
}

Primitive primitive_from_string(std::string_view name) {
  static const std::map<std::string_view, Primitive> aliases = {
      {"S†", Primitive::kSdg},        {"S+", Primitive::kSdg},     {"√X", Primitive::kSqrtX},
      {"√X†", Primitive::kSqrtXdg},   {"SqrtX+", Primitive::kSqrtXdg}, {"H'", Primitive::kHp},
      {"Identity", Primitive::kI}};
  for (Primitive p : kAllPrimitives) {
    if (to_string(p) == name) return p;
  }
  if (auto it = aliases.find(name); it != aliases.end()) return it->second;
  throw InvalidInput("unknown gate name: " + std::string(name));
}

Eigen::Matrix2cd primitive_target(Primitive p) {
  const double pi = std::numbers::pi;
  const Eigen::Vector3d x(1, 0, 0);
  const Eigen::Vector3d z(0, 0, 1);
  switch (p) {
    case Primitive::kI: return Eigen::Matrix2cd::Identity();
    case Primitive::kX: return rotation(x, pi);
    case Primitive::kZ: return rotation(z, pi);
    case Primitive::kS: return rotation(z, pi / 2);
    case Primitive::kSdg: return rotation(z, -pi / 2);
    case Primitive::kSqrtX: return rotation(x, pi / 2);
    case Primitive::kSqrtXdg: return rotation(x, -pi / 2);
    case Primitive::kH: return rotation(Eigen::Vector3d(1, 0, 1), pi);
    case Primitive::kHp: return rotation(Eigen::Vector3d(1, 0, -1), pi);
  }
  throw InvalidInput("unknown primitive");
}

PrimitiveRow primitive_row(Primitive p) {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r6 = std::sqrt(6.0);
  const double xa = 1 - 1 / (2 * r3);
  const double ha = 1 - 1 / (2 * r2) - 1 / (2 * r6);
  switch (p) {
    case Primitive::kI: return {1, 1, 1, 0.5};
    case Primitive::kX: return {xa, 1 - 1 / r3, 1, 0.5};
    case Primitive::kZ: return {0.5, 1, 1, 0.5};
    case Primitive::kS: return {0.5, 1, 1, 0.25};
    case Primitive::kSdg: return {1, 0.5, 0.5, 0.25};
    case Primitive::kSqrtX: return {xa, 1 - 1 / r3, 1, 0.25};
    case Primitive::kSqrtXdg: return {xa, 1, 1 - 1 / r3, 0.25};
    case Primitive::kH: return {ha, 1 - 1 / r6, 1, 0.5};
    case Primitive::kHp: return {ha, 1, 1 - 1 / r6, 0.5};
  }
  throw InvalidInput("unknown primitive");
}

std::array<Bond, 3> age_bonds(Encoding encoding) {
  switch (encoding) {
    case Encoding::kSageT: return {Bond{0, 1}, Bond{0, 2}, Bond{0, 3}};
    case Encoding::kTriageTriangle: return {Bond{0, 1}, Bond{0, 2}, Bond{1, 2}};
    default: throw InvalidInput("AGE primitives exist for SAGE_T and TRIAGE_TRIANGLE only");
  }
}

PulseSegment primitive_pulse(Primitive p, double j0_mhz, Encoding encoding) {
  if (!(j0_mhz > 0.0)) throw InvalidInput("J_0 must be positive");
  const auto bonds = age_bonds(encoding);
  const PrimitiveRow row = primitive_row(p);
  CouplingSet c(DeviceGeometry::for_encoding(encoding));
  c.set_exchange(bonds[0], row.ja * j0_mhz);
  c.set_exchange(bonds[1], row.jb * j0_mhz);
  c.set_exchange(bonds[2], row.jc * j0_mhz);
  return {c, 2.0 * row.phi / j0_mhz * 1000.0};
}

PulseSegment opposite_rotation_pulse(double axis_x, double axis_z, double angle, double j0_mhz, Encoding encoding) {
  const double norm = std::hypot(axis_x, axis_z);
  if (!(norm > 0.0) || !(j0_mhz > 0.0)) throw InvalidInput("opposite_rotation_pulse: bad axis or J_0");
  const auto bonds = age_bonds(encoding);
  CouplingSet c(DeviceGeometry::for_encoding(encoding));
  if (angle == 0.0) {
    for (const Bond& b : bonds) c.set_exchange(b, j0_mhz);
    return {c, 1000.0 / j0_mhz};
  }
  const double sign = angle > 0 ? 1.0 : -1.0;
  const double cx = sign * axis_x / norm * j0_mhz / 4.0;
  const double cz = sign * axis_z / norm * j0_mhz / 4.0;
  const double r3 = std::sqrt(3.0);
  const double ja = j0_mhz - 4.0 * cz / 3.0;
  const double jc = (2.0 * j0_mhz + 4.0 * cz / 3.0 + 4.0 * cx / r3) / 2.0;
  const double jb = (2.0 * j0_mhz + 4.0 * cz / 3.0 - 4.0 * cx / r3) / 2.0;
  if (ja < 0 || jb < 0 || jc < 0) throw InvalidInput("opposite_rotation_pulse: infeasible (negative coupling)");
  c.set_exchange(bonds[0], ja);
  c.set_exchange(bonds[1], jb);
  c.set_exchange(bonds[2], jc);
  return {c, std::abs(angle) / (std::numbers::pi * j0_mhz) * 1000.0};
}

CMatrix encoded_unitary(const PulseSchedule& schedule, const NoiseRealization* noise) {
  const CMatrix c = computational_columns(schedule.geometry).cast<cplx>();
  return c.adjoint() * schedule_unitary(schedule, noise) * c;
}

namespace {

PulseSchedule age_schedule(const std::vector<Primitive>& time_order, Encoding encoding, double j0) {
  PulseSchedule s(DeviceGeometry::for_encoding(encoding));
  for (Primitive p : time_order) s.push(primitive_pulse(p, j0, encoding));
  return s;
}

CompiledClifford compile_age(const CliffordElement& e, Encoding encoding, double j0) {
  auto attempt = [&](const std::vector<Primitive>& time_order) -> std::optional<CompiledClifford> {
    PulseSchedule s = age_schedule(time_order, encoding, j0);
    const double d = phase_distance(encoded_unitary(s), e.target);
    if (d > 1e-8) return std::nullopt;
    std::vector<std::string> names;
    for (Primitive p : time_order) names.emplace_back(to_string(p));
    s.label = e.description;
    return CompiledClifford{std::move(s), std::move(names), d};
  };

  std::vector<Primitive> listed;
  for (const std::string& g : e.age_gates) listed.push_back(primitive_from_string(g));
  // written as a matrix product: the rightmost gate acts first
  std::vector<Primitive> forward(listed.rbegin(), listed.rend());
  if (auto r = attempt(forward)) return *r;
  if (auto r = attempt(listed)) return *r;

  std::optional<CompiledClifford> best;
  auto consider = [&](std::vector<Primitive> order) {
    auto r = attempt(order);
    if (!r) return;
    auto score = [&](const CompiledClifford& c) {
      int shared = 0;
      for (const auto& n : c.gates)
        for (Primitive p : listed) shared += n == to_string(p);
      return std::make_pair(-shared, c.schedule.duration_ns());
    };
    if (!best || score(*r) < score(*best)) best = std::move(r);
  };
  for (Primitive a : kAllPrimitives) {
    if (a == Primitive::kI) continue;
    consider({a});
    for (Primitive b : kAllPrimitives) {
      if (b != Primitive::kI) consider({a, b});
    }
  }
  if (!best) throw CompilationError("no two-pulse AGE decomposition for " + e.description);
  return *best;
}

// SU(2) coordinates of a 2x2 unitary, sign-ambiguous.
Eigen::Vector4d quaternion(const Eigen::Matrix2cd& u) {
  const cplx root = std::sqrt(u.determinant());
  const Eigen::Matrix2cd s = u / root;
  return {s(0, 0).real(), s(0, 0).imag(), s(1, 0).real(), s(1, 0).imag()};
}

struct EoProblem {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Propagator* pulse[2];
  const RMatrix* comp;
  int first = 0;
  int n = 1;
  Eigen::Vector4d target;

  int inputs() const { return n; }
  int values() const { return 4; }

  Eigen::Matrix2cd unitary(const Eigen::VectorXd& t) const {
    CMatrix u = CMatrix::Identity(comp->rows(), comp->rows());
    for (int i = 0; i < n; ++i) u = pulse[(first + i) % 2]->unitary(t(i)) * u;
    return comp->transpose().cast<cplx>() * u * comp->cast<cplx>();
  }
  int operator()(const Eigen::VectorXd& t, Eigen::VectorXd& f) const {
    const Eigen::Vector4d q = quaternion(unitary(t));
    f = ((q - target).norm() < (q + target).norm()) ? Eigen::VectorXd(q - target) : Eigen::VectorXd(q + target);
    return 0;
  }
};

CompiledClifford compile_eo(const CliffordElement& e, double j0) {
  const DeviceGeometry g = DeviceGeometry::eo_linear();
  const double period = 1000.0 / j0;
  if (e.index == 0) {
    PulseSchedule s(g, e.description);
    s.push({CouplingSet(g), period});
    return {std::move(s), {"idle"}, 0.0};
  }
  const SectorBasis basis = SectorBasis::for_geometry(g);
  const RMatrix comp = computational_columns(g);
  CouplingSet c12(g);
  c12.set_exchange({0, 1}, j0);
  CouplingSet c23(g);
  c23.set_exchange({1, 2}, j0);
  const Propagator p12(build_sector_hamiltonian(basis, c12));
  const Propagator p23(build_sector_hamiltonian(basis, c23));
  const CouplingSet* couplings[2] = {&c12, &c23};
  const Eigen::Vector4d target = quaternion(e.target);

  std::optional<CompiledClifford> best;
  for (int n = 1; n <= 4 && !best; ++n) {
    for (int first = 0; first < 2; ++first) {
      EoProblem prob{{&p12, &p23}, &comp, first, n, target};
      Eigen::NumericalDiff<EoProblem> nd(prob);
      CounterRng rng(stream_key(hash_string("eo-compile"), static_cast<std::uint64_t>(e.index),
                                static_cast<std::uint64_t>(10 * n + first)));
      for (int start = 0; start < 24; ++start) {
        Eigen::VectorXd t(n);
        for (int i = 0; i < n; ++i) t(i) = rng.uniform(0.02, 0.98) * period;
        Eigen::LevenbergMarquardt<Eigen::NumericalDiff<EoProblem>> lm(nd);
        lm.parameters.xtol = 1e-14;
        lm.parameters.ftol = 1e-14;
        lm.minimize(t);
        Eigen::VectorXd f(4);
        prob(t, f);
        if (f.norm() > 1e-9) continue;

        PulseSchedule s(g, e.description);
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) {
          double ti = std::fmod(t(i), period);
          if (ti < 0) ti += period;
          if (ti < 1e-9 * period || period - ti < 1e-9 * period) continue;
          const int kind = (first + i) % 2;
          s.push({*couplings[kind], ti});
          names.emplace_back(kind == 0 ? "J12" : "J23");
        }
        if (s.segments.empty()) continue;
        const double d = phase_distance(encoded_unitary(s), e.target);
        if (d > 1e-8) continue;
        if (!best || s.segments.size() < best->schedule.segments.size() ||
            (s.segments.size() == best->schedule.segments.size() &&
             s.duration_ns() < best->schedule.duration_ns() - 1e-9)) {
          best = CompiledClifford{std::move(s), std::move(names), d};
        }
      }
    }
  }
  if (!best) throw CompilationError("EO search did not converge for " + e.description);
  return *best;
}

}  // namespace

CompiledClifford compile_clifford(int index, Encoding encoding, double j0_mhz) {
  if (index < 0 || index >= 24) throw InvalidInput("Clifford index out of range");
  if (!(j0_mhz > 0.0)) throw InvalidInput("J_0 must be positive");
  const CliffordElement& e = clifford_group()[static_cast<std::size_t>(index)];
  switch (encoding) {
    case Encoding::kSageT:
    case Encoding::kTriageTriangle: return compile_age(e, encoding, j0_mhz);
    case Encoding::kEoLinear: return compile_eo(e, j0_mhz);
    default: throw InvalidInput("compile_clifford: unsupported encoding");
  }
}

const std::vector<CompiledClifford>& clifford_schedules(Encoding encoding, double j0_mhz) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::vector<CompiledClifford>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(static_cast<int>(encoding), j0_mhz);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<CompiledClifford> all;
    for (int i = 0; i < 24; ++i) all.push_back(compile_clifford(i, encoding, j0_mhz));
    it = cache.emplace(key, std::move(all)).first;
  }
  return it->second;
}

}  // namespace sage
