#include "sage/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>
#include <omp.h>

#include "sage/analysis.hpp"
#include "sage/gates.hpp"
#include "sage/two_qubit.hpp"

namespace sage {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kIdle: return "idle";
    case ExperimentKind::kRb: return "rb";
    case ExperimentKind::kTwoQubit: return "two_qubit";
    case ExperimentKind::kCalibrate: return "calibrate";
    case ExperimentKind::kSwTable: return "sw_table";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::kIdle, ExperimentKind::kRb, ExperimentKind::kTwoQubit, ExperimentKind::kCalibrate,
                 ExperimentKind::kSwTable}) {
    if (to_string(k) == s) return k;
  }
  if (s == "two-qubit") return ExperimentKind::kTwoQubit;
  if (s == "sw-table") return ExperimentKind::kSwTable;
  throw InvalidInput("unknown experiment kind: " + std::string(s));
}

namespace {

std::string fmt_num(double x) { return fmt::format("{:.12g}", x); }

void require_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw InvalidInput(std::string(what) + " must be strictly increasing");
  }
}

const std::set<std::string> kAxes = {"delta_h_khz", "delta_j", "jc_mhz", "j0_mhz"};

}  // namespace

void ExperimentConfig::validate() const {
  if (n_realizations < 1) throw InvalidInput("n_realizations must be >= 1");
  if (!(j0_mhz > 0.0)) throw InvalidInput("j0_mhz must be positive");
  require_increasing(sweep_values, "sweep values");
  require_increasing(qeff_delta_j, "qeff_delta_j");
  require_increasing(t2eff_delta_h_khz, "t2eff_delta_h_khz");
  if (!kAxes.contains(sweep_axis)) throw InvalidInput("unknown sweep axis: " + sweep_axis);
  NoiseSpec{delta_h_khz, delta_j}.validate();
  for (Encoding e : encodings) {
    const bool single = e == Encoding::kSageT || e == Encoding::kTriageTriangle || e == Encoding::kEoLinear;
    switch (kind) {
      case ExperimentKind::kIdle:
      case ExperimentKind::kRb:
        if (!single) throw InvalidInput(fmt::format("{} does not support {}", to_string(kind), to_string(e)));
        break;
      case ExperimentKind::kTwoQubit:
      case ExperimentKind::kSwTable:
        if (e != Encoding::kSagePair8Dot) {
          throw InvalidInput(fmt::format("{} does not support {}", to_string(kind), to_string(e)));
        }
        break;
      case ExperimentKind::kCalibrate: break;
    }
  }
  if (kind == ExperimentKind::kRb) {
    if (n_sequences < 1) throw InvalidInput("n_sequences must be >= 1");
    if (lengths.size() < 5) throw InvalidInput("rb needs at least 5 sequence lengths");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] < 1 || (i > 0 && lengths[i] <= lengths[i - 1])) {
        throw InvalidInput("sequence lengths must be positive and strictly increasing");
      }
    }
  }
  if ((kind == ExperimentKind::kIdle || kind == ExperimentKind::kRb) &&
      sweep_axis != "delta_h_khz" && sweep_axis != "delta_j") {
    throw InvalidInput("idle/rb sweeps run over delta_h_khz or delta_j");
  }
}

void ExperimentConfig::apply_fast() {
  n_realizations = std::max(1, n_realizations / 10);
  n_sequences = std::max(1, n_sequences / 10);
}

json ExperimentConfig::to_json(bool include_output) const {
  json j;
  j["kind"] = std::string(to_string(kind));
  std::vector<std::string> enc;
  for (Encoding e : encodings) enc.emplace_back(to_string(e));
  j["encodings"] = enc;
  j["j0_mhz"] = j0_mhz;
  j["jc_mhz"] = jc_mhz;
  j["delta_h_khz"] = delta_h_khz;
  j["delta_j"] = delta_j;
  j["sweep"] = {{"axis", sweep_axis}, {"values", sweep_values}};
  j["n_realizations"] = n_realizations;
  j["n_sequences"] = n_sequences;
  j["lengths"] = lengths;
  j["fixed_gate_time_ns"] = fixed_gate_time_ns;
  j["qeff_delta_j"] = qeff_delta_j;
  j["t2eff_delta_h_khz"] = t2eff_delta_h_khz;
  j["master_seed"] = master_seed;
  if (include_output) j["output"] = output.string();
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> known = {"kind", "encodings", "j0_mhz", "jc_mhz", "delta_h_khz", "delta_j",
                                              "sweep", "n_realizations", "n_sequences", "lengths",
                                              "fixed_gate_time_ns", "qeff_delta_j", "t2eff_delta_h_khz",
                                              "master_seed", "output"};
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw InvalidInput("unknown config field: " + k);
  }
  ExperimentConfig c = defaults(experiment_kind_from_string(j.at("kind").get<std::string>()));
  if (j.contains("encodings")) {
    c.encodings.clear();
    for (const auto& e : j["encodings"]) c.encodings.push_back(encoding_from_string(e.get<std::string>()));
  }
  c.j0_mhz = j.value("j0_mhz", c.j0_mhz);
  c.jc_mhz = j.value("jc_mhz", c.jc_mhz);
  c.delta_h_khz = j.value("delta_h_khz", c.delta_h_khz);
  c.delta_j = j.value("delta_j", c.delta_j);
  if (j.contains("sweep")) {
    c.sweep_axis = j["sweep"].value("axis", c.sweep_axis);
    c.sweep_values = j["sweep"].value("values", c.sweep_values);
  }
  c.n_realizations = j.value("n_realizations", c.n_realizations);
  c.n_sequences = j.value("n_sequences", c.n_sequences);
  c.lengths = j.value("lengths", c.lengths);
  c.fixed_gate_time_ns = j.value("fixed_gate_time_ns", c.fixed_gate_time_ns);
  c.qeff_delta_j = j.value("qeff_delta_j", c.qeff_delta_j);
  c.t2eff_delta_h_khz = j.value("t2eff_delta_h_khz", c.t2eff_delta_h_khz);
  c.master_seed = j.value("master_seed", c.master_seed);
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kIdle:
      c.encodings = {Encoding::kSageT, Encoding::kTriageTriangle, Encoding::kEoLinear};
      c.sweep_axis = "delta_h_khz";
      c.sweep_values = {10, 20, 40, 50, 70, 100, 150, 200, 300};
      c.output = "out/idle";
      break;
    case ExperimentKind::kRb:
      c.encodings = {Encoding::kSageT, Encoding::kTriageTriangle, Encoding::kEoLinear};
      c.delta_j = 7e-3;
      c.sweep_axis = "delta_h_khz";
      c.sweep_values = {100};
      c.n_realizations = 100;
      c.output = "out/rb";
      break;
    case ExperimentKind::kTwoQubit:
      c.encodings = {Encoding::kSagePair8Dot};
      c.j0_mhz = 20.0;
      c.jc_mhz = 4.0;
      c.delta_h_khz = 50.0;
      c.sweep_axis = "delta_j";
      c.sweep_values = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
      c.n_realizations = 500;
      c.fixed_gate_time_ns = 1000.0;
      c.output = "out/two_qubit";
      break;
    case ExperimentKind::kCalibrate:
      c.encodings = {};
      c.qeff_delta_j = {1e-3, 2e-3, 5e-3, 7e-3, 1e-2};
      c.t2eff_delta_h_khz = {10, 25, 50, 100, 250};
      c.sweep_values = {};
      c.output = "out/calibrate";
      break;
    case ExperimentKind::kSwTable:
      c.encodings = {Encoding::kSagePair8Dot};
      c.j0_mhz = 20.0;
      c.jc_mhz = 2.0;
      c.sweep_values = {};
      c.output = "out/sw_table";
      break;
  }
  return c;
}

std::string ExperimentConfig::hash() const {
  return fmt::format("{:016x}", hash_string(to_json(false).dump()));
}

std::string ExperimentRecord::key() const { return encoding + "|" + axis + "=" + fmt_num(value); }

json ExperimentRecord::to_json() const {
  return {{"config_hash", config_hash}, {"seed", seed},     {"encoding", encoding},       {"axis", axis},
          {"value", value},             {"outputs", outputs}, {"status", status}, {"wall_time_s", wall_time_s}};
}

ExperimentRecord ExperimentRecord::from_json(const json& j) {
  ExperimentRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.encoding = j.at("encoding").get<std::string>();
  r.axis = j.at("axis").get<std::string>();
  r.value = j.at("value").get<double>();
  r.outputs = j.at("outputs").get<std::map<std::string, double>>();
  r.status = j.at("status").get<std::string>();
  r.wall_time_s = j.value("wall_time_s", 0.0);
  return r;
}

namespace {

// Persisted per-point records plus the final CSV / metadata for one run.
class RecordStore {
 public:
  RecordStore(const ExperimentConfig& config, const RunOptions& options)
      : config_(config), options_(options), hash_(config.hash()), dir_(config.output) {
    fs::create_directories(dir_);
    journal_ = dir_ / (std::string(to_string(config.kind)) + "_records.jsonl");
    if (options.resume && fs::exists(journal_)) {
      std::ifstream in(journal_);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        ExperimentRecord r = ExperimentRecord::from_json(json::parse(line));
        if (r.config_hash != hash_) {
          throw Error(fmt::format("{} holds records from configuration {} but this run is {}", journal_.string(),
                                  r.config_hash, hash_));
        }
        done_[r.key()] = std::move(r);
      }
    } else if (fs::exists(journal_)) {
      fs::remove(journal_);
    }
  }

  const std::string& hash() const { return hash_; }
  const fs::path& dir() const { return dir_; }

  /// Returns the stored record for (encoding, axis, value) or computes it.
  template <typename F>
  const ExperimentRecord& point(const std::string& encoding, const std::string& axis, double value, F compute) {
    ExperimentRecord probe;
    probe.encoding = encoding;
    probe.axis = axis;
    probe.value = value;
    const std::string key = probe.key();
    if (auto it = done_.find(key); it != done_.end()) {
      order_.push_back(key);
      return it->second;
    }
    const auto start = std::chrono::steady_clock::now();
    ExperimentRecord r = probe;
    r.config_hash = hash_;
    r.seed = config_.master_seed;
    try {
      compute(r);
    } catch (const std::exception& e) {
      r.status = std::string("error: ") + e.what();
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
      std::ofstream out(journal_, std::ios::app);
      out << r.to_json().dump() << '\n';
    }
    if (!options_.quiet) {
      fmt::print("  {:<18} {}={:<10} {}\n", encoding, axis, fmt_num(value), r.status);
    }
    order_.push_back(key);
    return done_.emplace(key, std::move(r)).first->second;
  }

  RunSummary finish(const json& extra_meta = json::object()) {
    RunSummary s;
    std::vector<std::string> columns;
    for (const auto& key : order_) {
      for (const auto& [name, v] : done_.at(key).outputs) {
        if (std::find(columns.begin(), columns.end(), name) == columns.end()) columns.push_back(name);
      }
    }
    s.csv_path = dir_ / (std::string(to_string(config_.kind)) + ".csv");
    std::ofstream csv(s.csv_path);
    csv << "config_hash,seed,encoding,axis,value";
    for (const auto& c : columns) csv << ',' << c;
    csv << ",status\n";
    json failures = json::array();
    json timings = json::object();
    std::map<std::string, std::ofstream> plots;
    for (const auto& key : order_) {
      const ExperimentRecord& r = done_.at(key);
      csv << r.config_hash << ',' << r.seed << ',' << r.encoding << ',' << r.axis << ',' << fmt_num(r.value);
      for (const auto& c : columns) {
        auto it = r.outputs.find(c);
        csv << ',' << (it == r.outputs.end() ? std::string() : fmt_num(it->second));
      }
      csv << ',' << (r.status.find(',') == std::string::npos ? r.status : "\"" + r.status + "\"") << '\n';
      timings[key] = r.wall_time_s;
      if (r.status != "ok" && r.status != "lower_bound") {
        ++s.failures;
        failures.push_back({{"point", key}, {"status", r.status}});
      }
      if (!columns.empty()) {
        auto& plot = plots[r.encoding];
        if (!plot.is_open()) {
          plot.open(dir_ / fmt::format("{}_{}.dat", to_string(config_.kind), r.encoding));
          plot << "# " << r.axis << ' ' << columns.front() << '\n';
        }
        auto it = r.outputs.find(columns.front());
        plot << fmt_num(r.value) << ' ' << (it == r.outputs.end() ? std::string("nan") : fmt_num(it->second))
             << '\n';
      }
      s.records.push_back(r);
    }
    json meta = {{"config", config_.to_json()},
                 {"config_hash", hash_},
                 {"failures", failures},
                 {"wall_time_s", timings},
                 {"threads", omp_get_max_threads()}};
    for (const auto& [k, v] : extra_meta.items()) meta[k] = v;
    std::ofstream(dir_ / (std::string(to_string(config_.kind)) + "_meta.json")) << meta.dump(2) << '\n';
    return s;
  }

 private:
  const ExperimentConfig& config_;
  RunOptions options_;
  std::string hash_;
  fs::path dir_;
  fs::path journal_;
  std::map<std::string, ExperimentRecord> done_;
  std::vector<std::string> order_;
};

void apply_jobs(const RunOptions& o) {
  if (o.jobs > 0) omp_set_num_threads(o.jobs);
}

NoiseSpec point_noise(const ExperimentConfig& c, double value) {
  NoiseSpec s{c.delta_h_khz, c.delta_j};
  if (c.sweep_axis == "delta_h_khz") s.delta_h_khz = value;
  if (c.sweep_axis == "delta_j") s.delta_j = value;
  return s;
}

// Sweep points of one encoding share noise streams (common random numbers).
std::uint64_t point_salt(const std::string& hash, const std::string& tag) { return hash_string(hash + "|" + tag); }

}  // namespace

RunSummary run_idle(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  apply_jobs(options);
  RecordStore store(config, options);
  std::ofstream traces(store.dir() / "idle_traces.csv");
  traces << "encoding,axis,value,time_ns,coherence\n";
  for (Encoding e : config.encodings) {
    for (double v : config.sweep_values) {
      store.point(std::string(to_string(e)), config.sweep_axis, v, [&](ExperimentRecord& r) {
        const NoiseSpec spec = point_noise(config, v);
        const std::uint64_t salt = point_salt(store.hash(), r.encoding);
        auto trace = [&](const std::vector<double>& t) {
          return coherence_trace(e, config.j0_mhz, spec, config.n_realizations, t, config.master_seed, salt);
        };
        const DecayMeasurement m = measure_gaussian_decay(trace, 1.0, 2.0e5);
        r.outputs["t2r_us"] = m.fit.rate / 1000.0;
        r.outputs["t2r_err_us"] = std::sqrt(std::max(0.0, m.fit.covariance(2, 2))) / 1000.0;
        r.outputs["fit_a"] = m.fit.a;
        r.outputs["fit_b"] = m.fit.b;
        r.status = m.fit.status == FitStatus::kOk ? "ok"
                   : m.fit.status == FitStatus::kNoDecay ? "lower_bound"
                                                         : "fit_failed";
        for (std::size_t i = 0; i < m.trace.times_ns.size(); ++i) {
          traces << r.encoding << ',' << r.axis << ',' << fmt_num(v) << ',' << fmt_num(m.trace.times_ns[i]) << ','
                 << fmt_num(m.trace.values[i]) << '\n';
        }
      });
    }
  }
  return store.finish();
}

namespace {

struct RbCurve {
  std::vector<double> survival;
  std::vector<double> leakage;
};

RbCurve rb_curve(Encoding e, const ExperimentConfig& config, const NoiseSpec& spec, std::uint64_t noise_salt,
                 std::uint64_t sequence_salt) {
  const auto& cliffords = clifford_schedules(e, config.j0_mhz);
  const DeviceGeometry g = DeviceGeometry::for_encoding(e);
  const RMatrix comp = computational_columns(g);
  // (|0> + i|1>)/sqrt2
  const CVector psi0 = (comp.col(0).cast<cplx>() + kI * comp.col(1).cast<cplx>()) / std::sqrt(2.0);
  const std::size_t n_len = config.lengths.size();
  const int n_streams = config.n_sequences * config.n_realizations;

  // sequences depend on (sequence index, length) only
  std::vector<std::vector<int>> sequences(static_cast<std::size_t>(config.n_sequences) * n_len);
  for (int s = 0; s < config.n_sequences; ++s) {
    for (std::size_t li = 0; li < n_len; ++li) {
      CounterRng rng(stream_key(config.master_seed, sequence_salt, static_cast<std::uint64_t>(s) * 4096 + li));
      auto& seq = sequences[static_cast<std::size_t>(s) * n_len + li];
      int total = 0;
      for (int k = 0; k < config.lengths[li]; ++k) {
        const int c = static_cast<int>(rng.below(24));
        seq.push_back(c);
        total = clifford_multiply(c, total);
      }
      seq.push_back(clifford_inverse(total));
    }
  }

  std::vector<double> surv(static_cast<std::size_t>(n_streams) * n_len);
  std::vector<double> leak(static_cast<std::size_t>(n_streams) * n_len);
#pragma omp parallel for schedule(dynamic)
  for (int stream = 0; stream < n_streams; ++stream) {
    const int s = stream / config.n_realizations;
    const NoiseRealization r = sample_realization(spec, g, static_cast<std::uint64_t>(stream), config.master_seed,
                                                  noise_salt);
    std::vector<CMatrix> u(24);
    for (int c = 0; c < 24; ++c) u[static_cast<std::size_t>(c)] = schedule_unitary(cliffords[c].schedule, &r);
    for (std::size_t li = 0; li < n_len; ++li) {
      CVector psi = psi0;
      for (int c : sequences[static_cast<std::size_t>(s) * n_len + li]) psi = u[static_cast<std::size_t>(c)] * psi;
      const std::size_t slot = static_cast<std::size_t>(stream) * n_len + li;
      surv[slot] = std::norm(psi0.dot(psi));
      leak[slot] = leakage(psi, comp);
    }
  }
  RbCurve out;
  out.survival.assign(n_len, 0.0);
  out.leakage.assign(n_len, 0.0);
  for (int stream = 0; stream < n_streams; ++stream) {
    for (std::size_t li = 0; li < n_len; ++li) {
      out.survival[li] += surv[static_cast<std::size_t>(stream) * n_len + li];
      out.leakage[li] += leak[static_cast<std::size_t>(stream) * n_len + li];
    }
  }
  for (std::size_t li = 0; li < n_len; ++li) {
    out.survival[li] /= n_streams;
    out.leakage[li] /= n_streams;
  }
  return out;
}

}  // namespace

RunSummary run_rb(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  apply_jobs(options);
  RecordStore store(config, options);
  std::ofstream decay(store.dir() / "rb_decay.csv");
  decay << "encoding,axis,value,length,survival,leakage\n";
  const std::uint64_t sequence_salt = point_salt(store.hash(), "sequences");
  for (Encoding e : config.encodings) {
    for (double v : config.sweep_values) {
      store.point(std::string(to_string(e)), config.sweep_axis, v, [&](ExperimentRecord& r) {
        const RbCurve curve = rb_curve(e, config, point_noise(config, v), point_salt(store.hash(), r.encoding),
                                       sequence_salt);
        std::vector<double> n(config.lengths.begin(), config.lengths.end());
        const FitResult f = fit_rb_decay(n, curve.survival);
        r.outputs["infidelity"] = 1.0 - f.clifford_fidelity();
        r.outputs["clifford_fidelity"] = f.clifford_fidelity();
        r.outputs["p"] = f.rate;
        r.outputs["p_err"] = std::sqrt(std::max(0.0, f.covariance(2, 2)));
        r.outputs["fit_a"] = f.a;
        r.outputs["fit_b"] = f.b;
        r.outputs["final_leakage"] = curve.leakage.back();
        r.status = f.ok() ? "ok" : std::string(to_string(f.status));
        for (std::size_t i = 0; i < n.size(); ++i) {
          decay << r.encoding << ',' << r.axis << ',' << fmt_num(v) << ',' << config.lengths[i] << ','
                << fmt_num(curve.survival[i]) << ',' << fmt_num(curve.leakage[i]) << '\n';
        }
      });
    }
  }
  return store.finish();
}

RunSummary run_two_qubit(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  apply_jobs(options);
  RecordStore store(config, options);
  const DeviceGeometry g = DeviceGeometry::sage_pair_8dot();
  const std::string enc(to_string(Encoding::kSagePair8Dot));
  json meta = json::object();

  auto intrinsic = [&](ExperimentRecord& r, const CnotResult& c) {
    r.outputs["t_cnot_ns"] = c.t_cnot_ns;
    r.outputs["t_estimate_ns"] = c.t_estimate_ns;
    r.outputs["t_makhlin_ns"] = c.t_makhlin_ns;
    r.outputs["makhlin_min"] = c.makhlin_min;
    r.outputs["intrinsic_fidelity"] = c.fidelity;
    r.outputs["intrinsic_leakage"] = c.leakage;
    r.outputs["max_inpulse_leakage"] = c.max_inpulse_leakage;
    r.outputs["theta"] = c.theta;
    r.outputs["jc_mhz"] = c.jc_mhz;
    r.outputs["j0_mhz"] = c.j0_mhz;
    r.outputs["fidelity_bound"] = 1.0 - c.jc_mhz * c.jc_mhz / (2.0 * c.j0_mhz * c.j0_mhz);
  };

  if (config.sweep_axis == "delta_j" || config.sweep_axis == "delta_h_khz") {
    const CnotResult cnot = cnot_schedule(config.j0_mhz, config.jc_mhz, g);
    const InteractionPropagator p(g, config.j0_mhz, config.jc_mhz);
    const double dt = 1000.0 / (16.0 * config.j0_mhz);
    std::vector<double> times;
    for (double t = 0.0; t <= 1.5 * cnot.t_estimate_ns; t += dt) times.push_back(t);
    {
      std::ofstream scan(store.dir() / "cnot_scan.csv");
      scan << "time_ns,makhlin_deviation,leakage,entropy\n";
      const auto dev = deviation_scan(p, times);
      const Trajectory ent = entropy_trace(p, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        scan << fmt_num(times[i]) << ',' << fmt_num(dev[i].deviation) << ',' << fmt_num(dev[i].leakage) << ','
             << fmt_num(ent.values[i]) << '\n';
      }
    }
    const double entropy = entropy_trace(p, {cnot.t_cnot_ns}).values.front();
    meta["cnot"] = {{"t_cnot_ns", cnot.t_cnot_ns},      {"t_makhlin_ns", cnot.t_makhlin_ns},
                    {"theta", cnot.theta},              {"fidelity", cnot.fidelity},
                    {"leakage", cnot.leakage},          {"entropy_at_t_cnot", entropy},
                    {"log2", std::log(2.0)}};
    for (double v : config.sweep_values) {
      store.point(enc, config.sweep_axis, v, [&](ExperimentRecord& r) {
        intrinsic(r, cnot);
        r.outputs["entropy_at_t_cnot"] = entropy;
        const NoisyGateStats s = noisy_cnot(cnot, point_noise(config, v), config.n_realizations, config.master_seed,
                                            point_salt(store.hash(), r.key()));
        r.outputs["fidelity"] = s.fidelity;
        r.outputs["infidelity"] = 1.0 - s.fidelity;
        r.outputs["fidelity_stderr"] = s.fidelity_stderr;
        r.outputs["leakage"] = s.leakage;
      });
    }
  } else if (config.sweep_axis == "jc_mhz") {
    for (double v : config.sweep_values) {
      store.point(enc, "jc_mhz", v, [&](ExperimentRecord& r) { intrinsic(r, cnot_schedule(config.j0_mhz, v, g)); });
    }
  } else {
    if (!(config.fixed_gate_time_ns > 0.0)) throw InvalidInput("j0_mhz sweep needs fixed_gate_time_ns");
    for (double v : config.sweep_values) {
      store.point(enc, "j0_mhz", v, [&](ExperimentRecord& r) {
        const double jc = std::sqrt(3.0 * v / (4.0 * config.fixed_gate_time_ns / 1000.0));
        const CnotResult c = cnot_schedule(v, jc, g);
        intrinsic(r, c);
        const NoisyGateStats s = noisy_cnot(c, NoiseSpec{config.delta_h_khz, config.delta_j}, config.n_realizations,
                                            config.master_seed, point_salt(store.hash(), r.key()));
        r.outputs["fidelity"] = s.fidelity;
        r.outputs["leakage"] = s.leakage;
      });
    }
  }
  return store.finish(meta);
}

const std::map<std::string, std::array<double, 16>>& analytic_sw_table() {
  static const auto table = [] {
    const double r3 = std::sqrt(3.0);
    // index = 4a + b with I,X,Y,Z = 0..3; a is qubit 1
    enum { IX = 1, IZ = 3, XI = 4, XX = 5, XZ = 7, ZI = 12, ZX = 13, ZZ = 15 };
    std::map<std::string, std::array<double, 16>> t;
    auto row = [&](const char* bond, std::initializer_list<std::pair<int, double>> terms) {
      std::array<double, 16> c{};
      for (auto [k, v] : terms) c[static_cast<std::size_t>(k)] = v;
      t[bond] = c;
    };
    row("15", {});
    row("16", {{IZ, 2}});
    row("17", {{IX, r3}, {IZ, -1}});
    row("18", {{IX, -r3}, {IZ, -1}});
    row("25", {{ZI, 2}});
    row("26", {{ZI, -2.0 / 3}, {IZ, -2.0 / 3}, {ZZ, 8.0 / 3}});
    row("27", {{IZ, 1.0 / 3}, {ZI, -2.0 / 3}, {IX, -r3 / 3}, {ZX, 4 * r3 / 3}, {ZZ, -4.0 / 3}});
    row("28", {{IZ, 1.0 / 3}, {ZI, -2.0 / 3}, {IX, r3 / 3}, {ZX, -4 * r3 / 3}, {ZZ, -4.0 / 3}});
    row("35", {{XI, r3}, {ZI, -1}});
    row("36", {{ZI, 1.0 / 3}, {IZ, -2.0 / 3}, {XI, -r3 / 3}, {XZ, 4 * r3 / 3}, {ZZ, -4.0 / 3}});
    row("37", {{IZ, 1.0 / 3}, {ZI, 1.0 / 3}, {IX, -r3 / 3}, {XI, -r3 / 3}, {XZ, -2 * r3 / 3}, {ZX, -2 * r3 / 3},
               {XX, 2}, {ZZ, 2.0 / 3}});
    row("38", {{IZ, 1.0 / 3}, {ZI, 1.0 / 3}, {IX, r3 / 3}, {XI, -r3 / 3}, {XZ, -2 * r3 / 3}, {ZX, 2 * r3 / 3},
               {XX, -2}, {ZZ, 2.0 / 3}});
    row("45", {{XI, -r3}, {ZI, -1}});
    row("46", {{ZI, 1.0 / 3}, {IZ, -2.0 / 3}, {XI, r3 / 3}, {XZ, -4 * r3 / 3}, {ZZ, -4.0 / 3}});
    row("47", {{IZ, 1.0 / 3}, {ZI, 1.0 / 3}, {IX, -r3 / 3}, {XI, r3 / 3}, {XZ, 2 * r3 / 3}, {ZX, -2 * r3 / 3},
               {XX, -2}, {ZZ, 2.0 / 3}});
    row("48", {{IZ, 1.0 / 3}, {ZI, 1.0 / 3}, {IX, r3 / 3}, {XI, r3 / 3}, {XZ, 2 * r3 / 3}, {ZX, 2 * r3 / 3},
               {XX, 2}, {ZZ, 2.0 / 3}});
    return t;
  }();
  return table;
}

const std::map<std::string, std::string>& analytic_sw_strings() {
  static const std::map<std::string, std::string> s = {
      {"15", "Identity"},
      {"16", "2 s2z"},
      {"17", "r3 s2x - s2z"},
      {"18", "-r3 s2x - s2z"},
      {"25", "2 s1z"},
      {"26", "(-2 s1z - 2 s2z + 8 s1z s2z)/3"},
      {"27", "(s2z - 2 s1z - r3 s2x + 4r3 s1z s2x - 4 s1z s2z)/3"},
      {"28", "(s2z - 2 s1z + r3 s2x - 4r3 s1z s2x - 4 s1z s2z)/3"},
      {"35", "r3 s1x - s1z"},
      {"36", "(s1z - 2 s2z - r3 s1x + 4r3 s1x s2z - 4 s1z s2z)/3"},
      {"37", "(s2z + s1z - r3 s2x - r3 s1x - 2r3 s1x s2z - 2r3 s1z s2x + 6 s1x s2x + 2 s1z s2z)/3"},
      {"38", "(s2z + s1z + r3 s2x - r3 s1x - 2r3 s1x s2z + 2r3 s1z s2x - 6 s1x s2x + 2 s1z s2z)/3"},
      {"45", "-r3 s1x - s1z"},
      {"46", "(s1z - 2 s2z + r3 s1x - 4r3 s1x s2z - 4 s1z s2z)/3"},
      {"47", "(s2z + s1z - r3 s2x + r3 s1x + 2r3 s1x s2z - 2r3 s1z s2x - 6 s1x s2x + 2 s1z s2z)/3"},
      {"48", "(s2z + s1z + r3 s2x + r3 s1x + 2r3 s1x s2z + 2r3 s1z s2x + 6 s1x s2x + 2 s1z s2z)/3"},
  };
  return s;
}

RunSummary run_sw_table(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  apply_jobs(options);
  RecordStore store(config, options);
  const double j0 = config.j0_mhz;
  const double jc = config.jc_mhz;
  const double unit = jc * jc / (16.0 * j0);
  std::ofstream text(store.dir() / "sw_table.txt");
  text << fmt::format("order-2 effective Hamiltonians, units of Jc^2/(16 J0), J0={} MHz Jc={} MHz\n", j0, jc);
  int index = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 4; b < 8; ++b, ++index) {
      const Bond bond{a, b};
      const std::string label = bond.label();
      store.point("J" + label, "bond", index, [&](ExperimentRecord& r) {
        const DeviceGeometry g = DeviceGeometry::sage_pair_8dot(bond);
        const SectorBasis basis = SectorBasis::for_geometry(g);
        const RMatrix h0 = build_sector_hamiltonian(basis, pair_couplings(g, j0, 0.0));
        const RMatrix v = build_sector_hamiltonian(basis, pair_couplings(g, j0, jc)) - h0;
        const PauliTable c = schrieffer_wolff(h0, v, computational_columns(g), 2).pauli();
        const auto& expect = analytic_sw_table().at(label);
        double worst = 0.0;
        std::string terms;
        for (int k = 0; k < 16; ++k) {
          const double x = c[static_cast<std::size_t>(k)] / unit;
          r.outputs["c_" + pauli_name(k)] = x;
          if (k > 0) worst = std::max(worst, std::abs(x - expect[static_cast<std::size_t>(k)]));
          if (k > 0 && std::abs(x) > 1e-9) terms += fmt::format(" {:+.4f} {}", x, pauli_name(k));
        }
        r.outputs["max_deviation"] = worst;
        text << fmt::format("J{}: identity {:+.4f} |{}   [analytic: {}]\n", label, c[0] / unit,
                            terms.empty() ? " 0" : terms, analytic_sw_strings().at(label));
        if (worst > 1e-6) r.status = "mismatch";
      });
    }
  }
  // third-order J26 diagonal, units of Jc^2/(32 J0)
  const DeviceGeometry g = DeviceGeometry::sage_pair_8dot({1, 5});
  const SectorBasis basis = SectorBasis::for_geometry(g);
  const RMatrix h0 = build_sector_hamiltonian(basis, pair_couplings(g, j0, 0.0));
  const RMatrix v = build_sector_hamiltonian(basis, pair_couplings(g, j0, jc)) - h0;
  const Matrix4c h3 = schrieffer_wolff(h0, v, computational_columns(g), 3).matrix;
  json diag = json::array();
  for (int k = 0; k < 4; ++k) diag.push_back(h3(k, k).real() / (jc * jc / (32.0 * j0)));
  text << "J26 order 3 diagonal (units Jc^2/(32 J0)): " << diag.dump() << '\n';
  return store.finish({{"j26_order3_diagonal", diag}});
}

RunSummary run_calibration(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  apply_jobs(options);
  RecordStore store(config, options);
  for (double dj : config.qeff_delta_j) {
    store.point("TWO_SPIN", "delta_j", dj, [&](ExperimentRecord& r) {
      const CalibrationResult c = calibrate_qeff(dj, config.n_realizations, config.master_seed);
      if (c.status != CalibrationStatus::kOk) {
        r.status = "divergent";
        return;
      }
      r.outputs["q_eff"] = c.value;
    });
  }
  for (double dh : config.t2eff_delta_h_khz) {
    store.point("TWO_SPIN", "delta_h_khz", dh, [&](ExperimentRecord& r) {
      const CalibrationResult c = calibrate_t2eff(dh, config.n_realizations, config.master_seed);
      if (c.status != CalibrationStatus::kOk) {
        r.status = "divergent";
        return;
      }
      r.outputs["t2_eff_us"] = c.value / 1000.0;
    });
  }
  return store.finish();
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  switch (config.kind) {
    case ExperimentKind::kIdle: return run_idle(config, options);
    case ExperimentKind::kRb: return run_rb(config, options);
    case ExperimentKind::kTwoQubit: return run_two_qubit(config, options);
    case ExperimentKind::kCalibrate: return run_calibration(config, options);
    case ExperimentKind::kSwTable: return run_sw_table(config, options);
  }
  throw InvalidInput("unknown experiment kind");
}

}  // namespace sage
