// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "sage/analysis.hpp"
#include "sage/experiments.hpp"
#include "sage/gates.hpp"
#include "sage/noise.hpp"
#include "sage/two_qubit.hpp"

using namespace sage;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "sage_acceptance" / name;
  fs::remove_all(p);
  return p;
}

RunOptions quiet_opts(int jobs = 0) {
  RunOptions o;
  o.jobs = jobs;
  o.resume = false;
  o.quiet = true;
  return o;
}

// value of `column` for (encoding, value) in a run
std::map<double, double> column(const RunSummary& s, const std::string& encoding, const std::string& name) {
  std::map<double, double> out;
  for (const auto& r : s.records) {
    if (r.encoding == encoding && r.outputs.contains(name)) out[r.value] = r.outputs.at(name);
  }
  return out;
}

double spread(const std::map<double, double>& m) {
  double lo = 1e300, hi = -1e300;
  for (const auto& [k, v] : m) lo = std::min(lo, v), hi = std::max(hi, v);
  return (hi - lo) / lo;
}

// least-squares slope of log y against log x for x >= x_min
double log_slope(const std::map<double, double>& m, double x_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : m) {
    if (x < x_min) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

Outcome spectrum() {
  Outcome o;
  const double j = 10.0;
  const SpectralReport s = spectral_report(CouplingSet::uniform(DeviceGeometry::sage_t(), j));
  o.require(s.qubit_splitting < 1e-9 * j, fmt::format("SAGE splitting {:.2e} J", s.qubit_splitting / j));
  o.require(std::abs(s.min_gap_to_leakage - j / 2) < 1e-9 * j, fmt::format("SAGE gap {:.12g} J", s.min_gap_to_leakage / j));
  // equal bonds J on the box give J_a = 2J and the same maximal gap J_a/2
  const SpectralReport b = spectral_report(CouplingSet::uniform(DeviceGeometry::box_4dot(), j / 2));
  o.require(b.qubit_splitting < 1e-9 * j && std::abs(b.min_gap_to_leakage - j / 2) < 1e-9 * j,
            fmt::format("box gap {:.12g} J_a", b.min_gap_to_leakage / j));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uj(0.0, 20.0), uh(-1.0, 1.0);
  double worst4 = 0.0, worst3 = 0.0;
  const RMatrix v4 = labeled_eigenbasis_4dot();
  const RMatrix v3 = labeled_eigenbasis_3dot();
  for (int trial = 0; trial < 100; ++trial) {
    const auto g4 = DeviceGeometry::box_4dot();
    CouplingSet c4(g4);
    for (const Bond& b : g4.bonds()) c4.set_exchange(b, uj(rng));
    for (int i = 0; i < 4; ++i) c4.set_field(i, uh(rng));
    const RMatrix brute4 = v4.transpose() * build_sector_hamiltonian(SectorBasis::for_geometry(g4), c4) * v4;
    worst4 = std::max(worst4, (brute4 - reference_matrix_4dot(c4).matrix().real()).cwiseAbs().maxCoeff());

    const auto g3 = DeviceGeometry::triage_triangle();
    CouplingSet c3(g3);
    for (const Bond& b : g3.bonds()) c3.set_exchange(b, uj(rng));
    double hsum = 0.0;
    for (int i = 0; i < 3; ++i) {
      c3.set_field(i, uh(rng));
      hsum += c3.field(i);
    }
    const RMatrix brute3 = v3.transpose() * build_sector_hamiltonian(SectorBasis::for_geometry(g3), c3) * v3;
    const RMatrix ref3 = reference_matrix_3dot(c3).matrix().real() - hsum / 3.0 * RMatrix::Identity(3, 3);
    worst3 = std::max(worst3, (brute3 - ref3).cwiseAbs().maxCoeff());
  }
  o.require(worst4 < 1e-10, fmt::format("4-dot max diff {:.2e}", worst4));
  o.require(worst3 < 1e-10, fmt::format("3-dot max diff {:.2e}", worst3));
  return o;
}

Outcome gate_table() {
  Outcome o;
  const RMatrix comp_s = computational_columns(DeviceGeometry::sage_t());
  double worst_f = 1.0, worst_l = 0.0;
  for (Encoding e : {Encoding::kSageT, Encoding::kTriageTriangle}) {
    for (Primitive p : kAllPrimitives) {
      PulseSchedule s(DeviceGeometry::for_encoding(e));
      s.push(primitive_pulse(p, 10.0, e));
      const CMatrix u = encoded_unitary(s);
      worst_f = std::min(worst_f, average_gate_fidelity(u, CMatrix(primitive_target(p))));
      worst_l = std::max(worst_l, 1.0 - (u.adjoint() * u).trace().real() / 2.0);
    }
  }
  o.require(worst_f > 1 - 1e-8, fmt::format("min primitive fidelity 1-{:.2e}", 1 - worst_f));
  o.require(worst_l < 1e-10, fmt::format("max leakage {:.2e}", worst_l));

  const auto& group = clifford_group();
  double worst_c = 0.0;
  bool closed = group.size() == 24;
  for (const auto& a : group) {
    for (const auto& b : group) {
      const Eigen::Matrix2cd prod = a.target * b.target;
      const int k = clifford_index_of(prod, 1e-7);
      closed = closed && k >= 0;
      if (k >= 0) worst_c = std::max(worst_c, phase_distance(prod, group[static_cast<std::size_t>(k)].target));
    }
  }
  o.require(closed && worst_c < 1e-7, fmt::format("24 Cliffords closed, max residual {:.2e}", worst_c));
  return o;
}

Outcome calibration() {
  Outcome o;
  auto within = [&](const CalibrationResult& r, double target, double scale, const char* what) {
    const double v = r.value * scale;
    o.require(r.status == CalibrationStatus::kOk && std::abs(v - target) <= 0.15 * target,
              fmt::format("{} = {:.3f} (target {:g})", what, v, target));
  };
  within(calibrate_qeff(5e-3), 70.0, 1.0, "Q(5e-3)");
  within(calibrate_qeff(7e-3), 50.0, 1.0, "Q(7e-3)");
  within(calibrate_t2eff(50.0), 2.6, 1e-3, "T2(50 kHz) us");
  within(calibrate_t2eff(100.0), 1.3, 1e-3, "T2(100 kHz) us");
  return o;
}

Outcome idle_coherence() {
  Outcome o;
  ExperimentConfig a = ExperimentConfig::defaults(ExperimentKind::kIdle);
  a.n_realizations = 625;
  a.delta_j = 5e-3;
  a.output = work_dir("idle_dh");
  const RunSummary dh = run_idle(a, quiet_opts());

  ExperimentConfig b = a;
  b.delta_h_khz = 50.0;
  b.sweep_axis = "delta_j";
  b.sweep_values = {1e-3, 2e-3, 5e-3, 1e-2, 2e-2};
  b.output = work_dir("idle_dj");
  const RunSummary dj = run_idle(b, quiet_opts());
  o.require(dh.failures == 0 && dj.failures == 0, fmt::format("{} failed points", dh.failures + dj.failures));

  const auto sage = column(dh, "SAGE_T", "t2r_us");
  o.require(spread(sage) < 0.25, fmt::format("SAGE T2R spread over dh {:.1f}%", 100 * spread(sage)));

  const auto s_dj = column(dj, "SAGE_T", "t2r_us");
  const auto e_dj = column(dj, "EO_LINEAR", "t2r_us");
  const auto t_dj = column(dj, "TRIAGE_TRIANGLE", "t2r_us");
  bool longest = true;
  for (const auto& [x, v] : s_dj) {
    if (x <= 5e-3 + 1e-12) longest = longest && v > e_dj.at(x) && v > t_dj.at(x);
  }
  o.require(longest, fmt::format("SAGE longest for dJ <= 5e-3 (at 5e-3: {:.2f} vs EO {:.2f}, TriAGE {:.2f} us)",
                                 s_dj.at(5e-3), e_dj.at(5e-3), t_dj.at(5e-3)));
  o.require(spread(e_dj) < 0.10, fmt::format("EO spread over dJ {:.1f}%", 100 * spread(e_dj)));

  for (const char* enc : {"EO_LINEAR", "TRIAGE_TRIANGLE"}) {
    const double slope = log_slope(column(dh, enc, "t2r_us"), 40.0);
    o.require(std::abs(slope + 1.0) <= 0.2, fmt::format("{} log-log slope {:.3f}", enc, slope));
  }
  return o;
}

Outcome randomized_benchmarking() {
  Outcome o;
  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kRb);
  c.apply_fast();
  c.output = work_dir("rb");
  const RunSummary s = run_rb(c, quiet_opts());
  o.require(s.failures == 0, fmt::format("{} failed points", s.failures));
  const double sage = column(s, "SAGE_T", "infidelity").at(100.0);
  const double eo = column(s, "EO_LINEAR", "infidelity").at(100.0);
  o.require(eo >= 3.0 * sage, fmt::format("infidelity SAGE {:.3e}, EO {:.3e}, ratio {:.2f} (need >= 3)", sage, eo, eo / sage));
  const double ls = column(s, "SAGE_T", "final_leakage").at(100.0);
  const double lt = column(s, "TRIAGE_TRIANGLE", "final_leakage").at(100.0);
  o.require(lt < ls, fmt::format("final leakage TriAGE {:.3e} < SAGE {:.3e}", lt, ls));
  return o;
}

Outcome two_qubit() {
  Outcome o;
  const CnotResult r = cnot_schedule(20.0, 4.0);
  o.require(std::abs(r.t_makhlin_ns - 785.0) <= 0.05 * 785.0, fmt::format("Makhlin minimum at {:.2f} ns", r.t_makhlin_ns));
  o.require(r.fidelity >= 0.995, fmt::format("F = {:.6f} at {:.2f} ns", r.fidelity, r.t_cnot_ns));
  o.require(r.leakage <= 5e-4, fmt::format("leakage {:.3e} (need <= 5e-4)", r.leakage));
  const InteractionPropagator p(DeviceGeometry::sage_pair_8dot(), 20.0, 4.0);
  const double s = entropy_trace(p, {r.t_cnot_ns}).values[0];
  o.require(std::abs(s - std::log(2.0)) <= 0.05 * std::log(2.0), fmt::format("entropy {:.5f}", s));
  return o;
}

Outcome cnot_scaling() {
  Outcome o;
  const double j0 = 20.0;
  for (double ratio : {0.05, 0.1, 0.15, 0.2}) {
    const double jc = ratio * j0;
    const CnotResult r = cnot_schedule(j0, jc);
    const double est = cnot_time_estimate_ns(j0, jc);
    const double bound = 1.0 - jc * jc / (2 * j0 * j0);
    o.require(std::abs(r.t_cnot_ns - est) <= 0.05 * est && r.fidelity >= bound,
              fmt::format("r={:g}: t {:.1f}/{:.1f} ns, F {:.5f} >= {:.5f}", ratio, r.t_cnot_ns, est, r.fidelity, bound));
  }
  return o;
}

Outcome schrieffer_wolff_table() {
  Outcome o;
  const double j0 = 20.0, jc = 2.0, r = jc / j0;
  const DeviceGeometry g = DeviceGeometry::sage_pair_8dot({1, 5});
  const SectorBasis basis = SectorBasis::for_geometry(g);
  const RMatrix h0 = build_sector_hamiltonian(basis, pair_couplings(g, j0, 0.0));
  const RMatrix v = build_sector_hamiltonian(basis, pair_couplings(g, j0, jc)) - h0;
  const Matrix4c h = schrieffer_wolff(h0, v, computational_columns(g), 3).matrix;
  const double unit = jc * jc / (32 * j0);
  const double expect[] = {-3 - 0.75 * r, -11 - 9.75 * r, -11 - 9.75 * r, 7.0 / 3 + 1.25 * r};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(h(k, k).real() / unit - expect[k]) / std::abs(expect[k]));
  o.require(worst < 1e-3, fmt::format("J26 third-order diagonal rel. error {:.2e}", worst));

  ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kSwTable);
  c.output = work_dir("sw");
  const RunSummary s = run_sw_table(c, quiet_opts());
  double dev = 0.0;
  for (const auto& rec : s.records) dev = std::max(dev, rec.outputs.at("max_deviation"));
  o.require(s.records.size() == 16 && s.failures == 0, fmt::format("16 bonds, max table deviation {:.2e}", dev));
  return o;
}

Outcome makhlin() {
  Outcome o;
  const MakhlinInvariants c = makhlin_invariants(cnot_matrix());
  o.require(std::abs(c.g1) < 1e-12 && std::abs(c.g2 - 1.0) < 1e-12, "CNOT -> (0, 1)");
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  auto local = [&] { return rotation(Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized(), ang(rng)); };
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Matrix4c u = kron(local(), local()) * cnot_matrix() * kron(local(), local());
    const MakhlinInvariants m = makhlin_invariants(u);
    worst = std::max({worst, std::abs(m.g1 - c.g1), std::abs(m.g2 - c.g2)});
  }
  o.require(worst < 1e-8, fmt::format("1000 dressed CNOTs, max drift {:.2e}", worst));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kIdle);
    c.sweep_values = {50, 200};
    c.n_realizations = 100;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kRb);
    c.n_realizations = 4;
    c.n_sequences = 4;
    c.lengths = {2, 4, 8, 16, 32};
    configs.push_back(c);
  }
  {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kTwoQubit);
    c.sweep_values = {1e-3, 1e-2};
    c.n_realizations = 16;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = ExperimentConfig::defaults(ExperimentKind::kCalibrate);
    c.qeff_delta_j = {5e-3};
    c.t2eff_delta_h_khz = {50};
    c.n_realizations = 200;
    configs.push_back(c);
  }
  configs.push_back(ExperimentConfig::defaults(ExperimentKind::kSwTable));

  int files = 0;
  for (ExperimentConfig c : configs) {
    const std::string kind(to_string(c.kind));
    fs::path dirs[2] = {work_dir("jobs1_" + kind), work_dir("jobs8_" + kind)};
    int jobs[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
      c.output = dirs[i];
      run_experiment(c, quiet_opts(jobs[i]));
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      const bool same = slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
      if (!same) o.require(false, entry.path().filename().string() + " differs");
      ++files;
    }
  }
  o.require(files >= 5, fmt::format("{} CSV files compared across --jobs 1 and 8", files));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const Criterion criteria[] = {
      {1, "spectrum", spectrum, 1.0},
      {2, "closed-form oracle", oracle_equivalence, 5.0},
      {3, "gate table", gate_table, 10.0},
      {4, "calibration anchors", calibration, 120.0},
      {5, "idle coherence", idle_coherence, 600.0},
      {6, "randomized benchmarking (fast)", randomized_benchmarking, 7200.0},
      {7, "two-qubit CNOT", two_qubit, 60.0},
      {8, "CNOT time scaling", cnot_scaling, 300.0},
      {9, "Schrieffer-Wolff", schrieffer_wolff_table, 60.0},
      {10, "Makhlin invariants", makhlin, 10.0},
      {11, "determinism", determinism, 1e9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (t > c.limit_s) o.require(false, fmt::format("runtime over {:g} s", c.limit_s));
    if (!o.pass) ++failed;
    fmt::print("{} criterion {:2d} {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, t, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of 11 criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}
