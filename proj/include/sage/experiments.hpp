#pragma once

// Experiment runners behind the sagesim CLI. Each runner consumes an
// ExperimentConfig, produces ExperimentRecords (one per encoding x sweep
// point), and writes them under the configured output directory.

#include <cstdint>
#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "sage/spin_model.hpp"

namespace sage {

enum class ExperimentKind { kIdle, kRb, kTwoQubit, kCalibrate, kSwTable };

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(std::string_view s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kIdle;
  std::vector<Encoding> encodings;
  double j0_mhz = 10.0;
  double jc_mhz = 4.0;
  double delta_h_khz = 50.0;  // held fixed unless swept
  double delta_j = 5e-3;
  /// delta_h_khz | delta_j | jc_mhz | j0_mhz
  std::string sweep_axis = "delta_h_khz";
  std::vector<double> sweep_values;
  int n_realizations = 2500;
  int n_sequences = 100;
  std::vector<int> lengths = {2, 4, 8, 16, 32, 64, 128, 256};
  double fixed_gate_time_ns = 0.0;  // two_qubit j0 sweep: J_c chosen for this estimate
  std::vector<double> qeff_delta_j;        // calibrate only
  std::vector<double> t2eff_delta_h_khz;   // calibrate only
  std::uint64_t master_seed = 1;
  std::filesystem::path output = "out";

  /// Throws InvalidInput when an invariant fails.
  void validate() const;
  /// Divides ensemble sizes by 10 (minimum 1).
  void apply_fast();

  nlohmann::json to_json(bool include_output = true) const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Built-in configuration for `kind`.
  static ExperimentConfig defaults(ExperimentKind kind);

  /// FNV-1a of the canonical JSON without the output path, as 16 hex digits.
  std::string hash() const;
};

struct ExperimentRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string encoding;
  std::string axis;
  double value = 0.0;
  std::map<std::string, double> outputs;
  std::string status = "ok";
  double wall_time_s = 0.0;  // metadata only, never written to CSV

  std::string key() const;
  nlohmann::json to_json() const;
  static ExperimentRecord from_json(const nlohmann::json& j);
};

struct RunOptions {
  int jobs = 0;  // 0 keeps the OpenMP default
  bool resume = true;
  bool quiet = false;
};

struct RunSummary {
  std::vector<ExperimentRecord> records;
  int failures = 0;
  std::filesystem::path csv_path;
};

RunSummary run_idle(const ExperimentConfig& config, const RunOptions& options = {});
RunSummary run_rb(const ExperimentConfig& config, const RunOptions& options = {});
RunSummary run_two_qubit(const ExperimentConfig& config, const RunOptions& options = {});
RunSummary run_sw_table(const ExperimentConfig& config, const RunOptions& options = {});
RunSummary run_calibration(const ExperimentConfig& config, const RunOptions& options = {});
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Analytic order-2 interqubit table, traceless parts in units of J_c^2/(16 J_0),
/// indexed like pauli_decompose. Keys are bond labels "15" ... "48".
const std::map<std::string, std::array<double, 16>>& analytic_sw_table();
/// Display form of an analytic row, e.g. "2 s2z".
const std::map<std::string, std::string>& analytic_sw_strings();

}  // namespace sage
