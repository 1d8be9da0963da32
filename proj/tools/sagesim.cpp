// sagesim: command-line front end for the simulation experiments.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "sage/experiments.hpp"
#include "sage/gates.hpp"
#include "sage/two_qubit.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool fast = false;
  bool fresh = false;
  bool quiet = false;
  int jobs = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory");
  sub->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "master seed");
  sub->add_flag("--fast", c.fast, "divide ensemble sizes by 10");
  sub->add_flag("--fresh", c.fresh, "ignore records from earlier runs");
  sub->add_flag("--quiet", c.quiet, "no per-point progress");
  sub->add_option("--jobs", c.jobs, "OpenMP threads")->check(CLI::NonNegativeNumber);
}

int run(sage::ExperimentKind kind, const Common& c) {
  sage::ExperimentConfig cfg = sage::ExperimentConfig::defaults(kind);
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.contains("kind")) j["kind"] = std::string(sage::to_string(kind));
    cfg = sage::ExperimentConfig::from_json(j);
    if (cfg.kind != kind) {
      throw sage::InvalidInput(fmt::format("config kind '{}' does not match subcommand", sage::to_string(cfg.kind)));
    }
  }
  if (c.seed_set) cfg.master_seed = c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  if (c.fast) cfg.apply_fast();
  cfg.validate();

  sage::RunOptions opt;
  opt.jobs = c.jobs;
  opt.resume = !c.fresh;
  opt.quiet = c.quiet;
  if (!c.quiet) fmt::print("{} [{}] -> {}\n", sage::to_string(kind), cfg.hash(), cfg.output.string());
  const sage::RunSummary s = sage::run_experiment(cfg, opt);
  fmt::print("{} points, {} failed, results in {}\n", s.records.size(), s.failures, s.csv_path.string());
  return s.failures > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-qubit encoding simulator"};
  app.require_subcommand(1);

  Common common;
  struct Entry {
    const char* name;
    sage::ExperimentKind kind;
    const char* help;
  };
  const Entry entries[] = {
      {"idle", sage::ExperimentKind::kIdle, "idle coherence T2* versus noise"},
      {"rb", sage::ExperimentKind::kRb, "single-qubit randomized benchmarking"},
      {"two-qubit", sage::ExperimentKind::kTwoQubit, "CNOT construction and noisy fidelity"},
      {"sw-table", sage::ExperimentKind::kSwTable, "interqubit effective Hamiltonian table"},
      {"calibrate", sage::ExperimentKind::kCalibrate, "two-spin noise calibration"},
  };
  std::vector<std::pair<CLI::App*, sage::ExperimentKind>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, common);
    subs.emplace_back(sub, e.kind);
  }

  std::string gate = "H";
  std::string encoding = "SAGE_T";
  double j0 = 10.0;
  CLI::App* compile = app.add_subcommand("compile-gate", "print the pulse schedule of a single-qubit gate");
  compile->add_option("gate", gate, "primitive (I X Z S Sdg SqrtX SqrtXdg H Hp) or Clifford index 0-23");
  compile->add_option("--encoding", encoding, "SAGE_T | TRIAGE_TRIANGLE | EO_LINEAR");
  compile->add_option("--j0", j0, "exchange J0 in MHz");

  double jc = 4.0;
  std::string spec_encoding = "SAGE_T";
  CLI::App* spectrum = app.add_subcommand("spectrum", "labelled spectrum and leakage gap at uniform coupling");
  spectrum->add_option("--encoding", spec_encoding);
  spectrum->add_option("--j0", j0);
  spectrum->add_option("--jc", jc, "interqubit exchange for SAGE_PAIR_8DOT");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [sub, kind] : subs) {
      if (*sub) return run(kind, common);
    }
    if (*compile) {
      const sage::Encoding enc = sage::encoding_from_string(encoding);
      sage::PulseSchedule schedule(sage::DeviceGeometry::for_encoding(enc));
      bool is_index = !gate.empty() && std::all_of(gate.begin(), gate.end(), ::isdigit);
      if (is_index) {
        const int idx = std::stoi(gate);
        if (idx < 0 || idx >= 24) throw sage::InvalidInput("Clifford index must be 0-23");
        const auto& c = sage::clifford_schedules(enc, j0)[static_cast<std::size_t>(idx)];
        fmt::print("Clifford {} ({}), residual {:.3g}\n", idx, sage::clifford_group()[idx].description, c.residual);
        schedule = c.schedule;
      } else {
        schedule.push(sage::primitive_pulse(sage::primitive_from_string(gate), j0, enc));
      }
      for (const auto& seg : schedule.segments) {
        fmt::print("{:10.4f} ns :", seg.duration_ns);
        for (const auto& [bond, j] : seg.couplings.exchanges()) fmt::print(" J{}={:.6g}", bond.label(), j);
        fmt::print("\n");
      }
      fmt::print("total {:.4f} ns\n", schedule.duration_ns());
      return 0;
    }
    if (*spectrum) {
      const sage::Encoding enc = sage::encoding_from_string(spec_encoding);
      const sage::DeviceGeometry g = sage::DeviceGeometry::for_encoding(enc);
      if (enc == sage::Encoding::kSagePair8Dot) {
        const sage::CnotResult r = sage::cnot_schedule(j0, jc, g);
        fmt::print("t_estimate {:.3f} ns  t_makhlin {:.3f} ns  t_cnot {:.3f} ns  theta {:.5f}  F {:.6f}\n",
                   r.t_estimate_ns, r.t_makhlin_ns, r.t_cnot_ns, r.theta, r.fidelity);
        return 0;
      }
      const sage::SpectralReport rep = sage::spectral_report(sage::CouplingSet::uniform(g, j0));
      fmt::print("qubit splitting {:.6g} MHz, leakage gap {:.6g} MHz{}\n", rep.qubit_splitting, rep.min_gap_to_leakage,
                 rep.leakage_hotspot ? " (hotspot)" : "");
      for (std::size_t k = 0; k < rep.energies.size(); ++k) fmt::print("  E{} = {:.6f}\n", k, rep.energies[k]);
      return 0;
    }
  } catch (const sage::InvalidInput& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
