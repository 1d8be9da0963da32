#include "doctest.h"

#include <cmath>

#include "sage/noise.hpp"

using namespace sage;

TEST_CASE("counter rng is deterministic and key-sensitive") {
  CounterRng a(stream_key(1, 2, 3)), b(stream_key(1, 2, 3)), c(stream_key(1, 2, 4));
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  CounterRng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(24) < 24);
  }
}

TEST_CASE("zero spec gives an all-zero realization") {
  const auto g = DeviceGeometry::sage_t();
  const NoiseRealization r = sample_realization(NoiseSpec{0.0, 0.0}, g, 5, 1);
  for (double h : r.h_khz) CHECK(h == 0.0);
  for (const auto& [b, e] : r.eps) CHECK(e == 0.0);
  CHECK(r.eps.size() == 3);
}

TEST_CASE("same seed and stream reproduce the realization") {
  const auto g = DeviceGeometry::sage_pair_8dot();
  const NoiseSpec s{50.0, 5e-3};
  const NoiseRealization a = sample_realization(s, g, 17, 99, 3);
  const NoiseRealization b = sample_realization(s, g, 17, 99, 3);
  const NoiseRealization c = sample_realization(s, g, 18, 99, 3);
  CHECK(a.h_khz == b.h_khz);
  CHECK(a.eps == b.eps);
  CHECK(a.h_khz != c.h_khz);
  CHECK(a.seed_path.stream_id == 17);
}

TEST_CASE("field draws have uniform-distribution moments") {
  const auto g = DeviceGeometry::chain(2);
  const NoiseSpec s{50.0, 0.0};
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double h = sample_realization(s, g, static_cast<std::uint64_t>(k), 11).h_khz[0];
    CHECK(std::abs(h) <= 50.0);
    sum += h;
    sum2 += h * h;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double var_expect = 50.0 * 50.0 / 3.0;
  // sd of the mean: sqrt(var/n); sd of the variance estimate: sqrt((m4 - var^2)/n), m4 = a^4/5
  CHECK(std::abs(mean) < 3.0 * std::sqrt(var_expect / n));
  const double m4 = std::pow(50.0, 4) / 5.0;
  CHECK(std::abs(var - var_expect) < 3.0 * std::sqrt((m4 - var_expect * var_expect) / n));
}

TEST_CASE("apply_noise scales exchange and offsets fields") {
  const auto g = DeviceGeometry::sage_t();
  const CouplingSet base = CouplingSet::uniform(g, 10.0);
  NoiseRealization r = sample_realization(NoiseSpec{0.0, 0.0}, g, 0, 1);
  r.eps[Bond{0, 2}] = 5e-3;
  r.h_khz[3] = 40.0;
  const CouplingSet n = apply_noise(base, r);
  CHECK(n.exchange(0, 2) == doctest::Approx(10.05));
  CHECK(n.exchange(0, 1) == doctest::Approx(10.0));
  CHECK(n.field(3) == doctest::Approx(0.04));

  for (int k = 0; k < 200; ++k) {
    const CouplingSet m = apply_noise(base, sample_realization(NoiseSpec{0.0, 5e-3}, g, k, 2));
    for (const auto& [b, j] : m.exchanges()) {
      CHECK(j >= 9.95 - 1e-12);
      CHECK(j <= 10.05 + 1e-12);
    }
  }
  const auto eo = DeviceGeometry::eo_linear();
  const CouplingSet idle = apply_noise(CouplingSet(eo), sample_realization(NoiseSpec{50.0, 0.5}, eo, 0, 1));
  for (const auto& [b, j] : idle.exchanges()) CHECK(j == 0.0);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS((NoiseSpec{-1.0, 0.0}.validate()), InvalidInput);
  CHECK_THROWS_AS((NoiseSpec{0.0, 1.5}.validate()), InvalidInput);
}

TEST_CASE("charge-noise calibration: oscillation count before 1/e") {
  CHECK(calibrate_qeff(5e-3).value == doctest::Approx(70.0).epsilon(0.15));
  CHECK(calibrate_qeff(7e-3).value == doctest::Approx(50.0).epsilon(0.15));
}

TEST_CASE("charge-noise calibration scales as 1/delta_J") {
  const double a = calibrate_qeff(2e-3, 1000).value;
  const double b = calibrate_qeff(2e-2, 1000).value;
  CHECK(a / b == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("gradient-noise calibration: singlet dephasing time") {
  CHECK(calibrate_t2eff(50.0).value / 1000.0 == doctest::Approx(2.6).epsilon(0.15));
  CHECK(calibrate_t2eff(100.0).value / 1000.0 == doctest::Approx(1.3).epsilon(0.15));
}

TEST_CASE("calibration without disorder is flagged") {
  CHECK(calibrate_t2eff(0.0).status != CalibrationStatus::kOk);
  CHECK(calibrate_qeff(0.0).status != CalibrationStatus::kOk);
}
