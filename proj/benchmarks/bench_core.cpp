#include <random>

#include <benchmark/benchmark.h>

#include "dyson/dyson.hpp"

using namespace dyson;

namespace {

OperatorMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  OperatorMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(normal(rng), normal(rng));
  return m;
}

void BM_MatExp(benchmark::State& state) {
  const OperatorMatrix a = random_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(a));
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_IntegrateFlow(benchmark::State& state) {
  const HamiltonianFamily family(RabiFamily{});
  const DysonSeed seed = build_dyson_seed(RandomSeed{50.0}, 7, 2);
  const Grid grid{1.0, 1.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(family, seed, grid));
}
BENCHMARK(BM_IntegrateFlow)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EvolveCryptounitary(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  std::vector<OperatorMatrix> coeffs;
  for (std::uint64_t j = 0; j < 2; ++j) {
    const OperatorMatrix a = random_matrix(n, 10 + j);
    coeffs.push_back(0.5 * (a + a.adjoint()));
  }
  const HamiltonianFamily family(PolyMatrixFamily{coeffs});
  const DysonSeed seed = build_dyson_seed(RandomSeed{50.0}, 3, n);
  const FlowTrace flow = integrate_flow(family, seed, Grid{1.0, 1e-3});
  const OperatorMatrix g = generator_g0(eval_h(family, 0.0), seed);
  const StateVector phi0 = StateVector::Unit(n, 0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_cryptounitary(g, flow, phi0));
}
BENCHMARK(BM_EvolveCryptounitary)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
  const ModelSpec spec{.name = "rabi", .family = HamiltonianFamily(RabiFamily{}), .seed = RandomSeed{50.0}, .rng_seed = 7};
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec));
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
