// Parallel kernels against their serial references across scenario counts.
// Run: ./bench_kernels [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "epf/rng.hpp"
#include "epf/scoring.hpp"

namespace {

Eigen::MatrixXd random_scenarios(int s, int d, std::uint64_t seed) {
  epf::Rng rng(seed);
  Eigen::MatrixXd m(s, d);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = 30.0 + 8.0 * rng.normal();
  }
  return m;
}

void bm_energy_score_parallel(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Eigen::MatrixXd scen = random_scenarios(s, 24, 7);
  const Eigen::VectorXd y = random_scenarios(1, 24, 11).row(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epf::energy_score(scen, y));
  }
  state.SetComplexityN(s);
}

void bm_energy_score_serial(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Eigen::MatrixXd scen = random_scenarios(s, 24, 7);
  const Eigen::VectorXd y = random_scenarios(1, 24, 11).row(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epf::reference::energy_score(scen, y));
  }
  state.SetComplexityN(s);
}

void bm_crps_sorted(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Eigen::MatrixXd scen = random_scenarios(s, 1, 7);
  std::vector<double> samples(scen.data(), scen.data() + s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epf::crps_sample(samples, 31.0));
  }
}

void bm_crps_serial(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Eigen::MatrixXd scen = random_scenarios(s, 1, 7);
  std::vector<double> samples(scen.data(), scen.data() + s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epf::reference::crps_sample(samples, 31.0));
  }
}

}  // namespace

BENCHMARK(bm_energy_score_parallel)->Arg(100)->Arg(300)->Arg(1000)->Complexity();
BENCHMARK(bm_energy_score_serial)->Arg(100)->Arg(300)->Arg(1000)->Complexity();
BENCHMARK(bm_crps_sorted)->Arg(100)->Arg(1000)->Arg(10000);
BENCHMARK(bm_crps_serial)->Arg(100)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
