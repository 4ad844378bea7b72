#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include <fairdyn/fairdyn.hpp>

using namespace fairdyn;

namespace {

const DynamicsParams kParams{0.99, 0.2, 0.0};
const LenderParams kLender{0.25, 0.6};

void BM_UpperTail(benchmark::State& state) {
  double A = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::upper_tail(A, 0.45, 1.6));
    A = A < 0.98 ? A + 0.01 : 0.01;
  }
}
BENCHMARK(BM_UpperTail);

void BM_InverseUpper(benchmark::State& state) {
  const auto p = specfun::BetaParams::from_mean(0.45, 1.6);
  double q = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::inv_reg_inc_beta_upper(q, p));
    q = q < 0.98 ? q + 0.01 : 0.01;
  }
}
BENCHMARK(BM_InverseUpper);

void BM_SolveBellman(benchmark::State& state) {
  BellmanOptions opts;
  opts.grid_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bellman(1.6, kParams, kLender, opts));
}
BENCHMARK(BM_SolveBellman)->Arg(129)->Arg(513)->Unit(benchmark::kMillisecond);

void BM_UniquenessScan(benchmark::State& state) {
  const auto grid = UniquenessGrid::standard();
  for (auto _ : state) benchmark::DoNotOptimize(uniqueness_scan(grid));
}
BENCHMARK(BM_UniquenessScan)->Unit(benchmark::kMillisecond);

void BM_EquilibriumCurve(benchmark::State& state) {
  std::vector<double> A(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < A.size(); ++i) A[i] = static_cast<double>(i) / static_cast<double>(A.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_curve(A, 1.6, kParams, {}));
}
BENCHMARK(BM_EquilibriumCurve)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_SimulateOptimal(benchmark::State& state) {
  const auto vf = std::make_shared<const ValueFunction>(solve_bellman(1.6, kParams, kLender));
  const std::vector<GroupSpec> groups = {{{0, "a"}, {0.3, 1.6}, kParams}, {{1, "b"}, {0.7, 1.6}, kParams}};
  const OptimalPolicy policy{{vf}};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(groups, policy, static_cast<std::size_t>(state.range(0)), kLender));
}
BENCHMARK(BM_SimulateOptimal)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SimulateParity(benchmark::State& state) {
  const std::vector<GroupSpec> groups = {{{0, "a"}, {0.3, 1.6}, kParams}, {{1, "b"}, {0.7, 1.6}, kParams}};
  const auto policy = FairPolicy::demographic_parity(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(groups, policy, static_cast<std::size_t>(state.range(0)), kLender));
}
BENCHMARK(BM_SimulateParity)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
