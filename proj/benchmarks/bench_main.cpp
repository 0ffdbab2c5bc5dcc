#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "swioss/conditions.hpp"
#include "swioss/envelope.hpp"
#include "swioss/family.hpp"
#include "swioss/signals.hpp"
#include "swioss/sim.hpp"

namespace {

using namespace swioss;

void BM_Eq9(benchmark::State& state) {
  double ls = 3.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ls);
    benchmark::DoNotOptimize(eval_eq9(ls, 0.73, 2.0, 3.5, 4.0, 3.5, 4.0));
  }
}
BENCHMARK(BM_Eq9);

void BM_GridSearchDwell(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search_dwell_times(3.5, 0.73, 2.0, 3.5, 4.0, n));
  }
}
BENCHMARK(BM_GridSearchDwell)->Arg(101)->Arg(401);

void BM_GenerateSignal(benchmark::State& state) {
  const SystemFamily f = builtin_paper_example();
  const double horizon = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_signal(f.rules(), {3.5, 4.0}, horizon, seed++));
  }
}
BENCHMARK(BM_GenerateSignal)->Arg(15)->Arg(1000);

void BM_IntegrateSwitched(benchmark::State& state) {
  const SystemFamily f = builtin_paper_example();
  const SwitchingSignal s = generate_signal(f.rules(), {3.5, 4.0}, 15.0, 7);
  Eigen::VectorXd x0(2);
  x0 << 0.5, -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_switched(f, s, InputSignal::uniform(-0.5, 0.5, 3), x0, 1e-3, 15.0));
  }
  state.SetItemsProcessed(state.iterations() * 15000);
}
BENCHMARK(BM_IntegrateSwitched)->Unit(benchmark::kMillisecond);

void BM_Psi2(benchmark::State& state) {
  const SystemFamily f = builtin_paper_example();
  const SwitchingSignal s =
      generate_signal(f.rules(), {3.5, 4.0}, static_cast<double>(state.range(0)), 9);
  const SignalFunctionals fn(s, f.rules(), 3.5, 0.73, 2.0);
  double t = 0.0;
  const double end = s.horizon();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.psi2(t));
    t += 0.37;
    if (t > end) t -= end;
  }
}
BENCHMARK(BM_Psi2)->Arg(50)->Arg(1000);

void BM_FindEstimatorParams(benchmark::State& state) {
  const DwellCertificate cert = certify(builtin_paper_example());
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_estimator_params(cert, n));
}
BENCHMARK(BM_FindEstimatorParams)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
