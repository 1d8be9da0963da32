#pragma once

// Quasistatic disorder: uniform per-site field offsets and per-bond relative
// exchange errors, drawn from a counter-based generator so every realization
// is a pure function of (master_seed, salt, stream_id).

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "sage/spin_model.hpp"

namespace sage {

/// SplitMix64 over a keyed counter. Cheap to construct, no shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n)

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s);  // FNV-1a 64
std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t salt, std::uint64_t stream_id);

struct NoiseSpec {
  double delta_h_khz = 0.0;
  double delta_j = 0.0;

  /// Throws InvalidInput outside delta_h >= 0, 0 <= delta_J < 1.
  void validate() const;
  bool is_zero() const { return delta_h_khz == 0.0 && delta_j == 0.0; }
};

struct SeedPath {
  std::uint64_t master_seed = 0;
  std::uint64_t salt = 0;
  std::uint64_t stream_id = 0;
};

struct NoiseRealization {
  std::vector<double> h_khz;     // per site
  std::map<Bond, double> eps;    // per geometry bond
  SeedPath seed_path;
};

/// Every geometry bond gets an ε draw even if the base coupling is zero, so
/// the stream layout does not depend on the operating point.
NoiseRealization sample_realization(const NoiseSpec& spec, const DeviceGeometry& geometry,
                                    std::uint64_t stream_id, std::uint64_t master_seed,
                                    std::uint64_t salt = 0);

/// J_ij (1 + ε_ij) and h_i + offset_i.
CouplingSet apply_noise(const CouplingSet& base, const NoiseRealization& r);

enum class CalibrationStatus { kOk, kNoDecay, kInvalid };

struct CalibrationResult {
  double value = 0.0;  // Q^eff (oscillations) or T2^eff (ns)
  CalibrationStatus status = CalibrationStatus::kOk;
  int n_realizations = 0;
};

/// Two-spin exchange oscillations |ud> -> |ud> with multiplicative J noise.
/// Gaussian fit of the ensemble envelope at the oscillation extrema; returns
/// the oscillation count where the fitted envelope reaches 1/e.
CalibrationResult calibrate_qeff(double delta_j, int n_realizations = 2500,
                                 std::uint64_t master_seed = 1);

/// Two-spin singlet dephasing under a random field gradient, J = 0.
CalibrationResult calibrate_t2eff(double delta_h_khz, int n_realizations = 2500,
                                  std::uint64_t master_seed = 1);

}  // namespace sage
