// Serial reference vs OpenMP ensemble kernels.

#include <benchmark/benchmark.h>

#include "sage/dynamics.hpp"
#include "sage/two_qubit.hpp"

namespace {

std::vector<double> grid() {
  std::vector<double> t;
  for (int i = 0; i < 64; ++i) t.push_back(100.0 * i);
  return t;
}

void coherence(benchmark::State& state, sage::Exec exec) {
  const auto times = grid();
  const auto enc = static_cast<sage::Encoding>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sage::coherence_trace(enc, 10.0, {50.0, 5e-3}, 256, times, 1, 0, exec));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}

void noisy_cnot(benchmark::State& state, sage::Exec exec) {
  static const sage::CnotResult cnot = sage::cnot_schedule(20.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(sage::noisy_cnot(cnot, {50.0, 1e-3}, 32, 1, 0, exec));
  state.SetItemsProcessed(state.iterations() * 32);
}

}  // namespace

BENCHMARK_CAPTURE(coherence, serial, sage::Exec::kSerial)
    ->Arg(static_cast<int>(sage::Encoding::kSageT))
    ->Arg(static_cast<int>(sage::Encoding::kEoLinear))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(coherence, parallel, sage::Exec::kParallel)
    ->Arg(static_cast<int>(sage::Encoding::kSageT))
    ->Arg(static_cast<int>(sage::Encoding::kEoLinear))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(noisy_cnot, serial, sage::Exec::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(noisy_cnot, parallel, sage::Exec::kParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
