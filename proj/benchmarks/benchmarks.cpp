#include <benchmark/benchmark.h>

#include <random>

#include "mtsc/logloss.hpp"
#include "mtsc/region_jd.hpp"
#include "mtsc/region_xd.hpp"
#include "mtsc/sim.hpp"

namespace {

mtsc::JointPmf dsbs() {
  return mtsc::validate_pmf({{0.375, 0.125}, {0.125, 0.375}});
}

void BM_JointEntropy(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> exp1(1.0);
  const int k = int(state.range(0));
  std::vector<double> q(std::size_t(k) * k);
  double sum = 0.0;
  for (double& v : q) sum += (v = exp1(rng));
  for (double& v : q) v /= sum;
  const mtsc::JointPmf p(k, k, q);
  for (auto _ : state) benchmark::DoNotOptimize(mtsc::joint_entropy(p));
}
BENCHMARK(BM_JointEntropy)->Arg(4)->Arg(16)->Arg(64);

void BM_JdContainsClosed(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  const mtsc::JdQuery q{0.5, 1.0, 0.4};
  for (auto _ : state)
    benchmark::DoNotOptimize(mtsc::jd_contains_closed(p, q));
}
BENCHMARK(BM_JdContainsClosed);

void BM_JdContainsLp(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  const mtsc::JdQuery q{0.5, 1.0, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(mtsc::jd_contains_lp(p, q));
}
BENCHMARK(BM_JdContainsLp);

void BM_XdSolve(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  mtsc::XdOptions opts;
  opts.restarts = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(mtsc::xd_min_hxu(p, 0.5, opts));
}
BENCHMARK(BM_XdSolve)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_XdGridOracle(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  const double step = 1.0 / double(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(mtsc::xd_grid_oracle(p, 0.5, step));
}
BENCHMARK(BM_XdGridOracle)->Arg(10)->Arg(25)->Arg(50)
    ->Unit(benchmark::kMillisecond);

void BM_SimulateWzTrial(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  const mtsc::SimConfig cfg{16, 0.1, int(state.range(0)), 0, 30.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(mtsc::simulate_wz(p, cfg, 0.4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateWzTrial)->Arg(10)->Arg(100)
    ->Unit(benchmark::kMicrosecond);

void BM_SimulateSmswTrial(benchmark::State& state) {
  const mtsc::JointPmf p = dsbs();
  const mtsc::SimConfig cfg{16, 0.1, int(state.range(0)), 0, 30.0};
  const mtsc::DistortionSplit split{0.6, 0.3, 0.3};
  for (auto _ : state)
    benchmark::DoNotOptimize(mtsc::simulate_smsw(p, cfg, 0.3, 0.5, split));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSmswTrial)->Arg(10)->Arg(100)
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
