#include <benchmark/benchmark.h>

#include <random>

#include "vapep/generator.hpp"
#include "vapep/matching.hpp"
#include "vapep/profile_solver.hpp"
#include "vapep/wsp.hpp"

namespace {

using namespace vapep;

CostMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Weight> dist(0, 100);
  CostMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = dist(rng);
  }
  return m;
}

void BM_MinCostValue(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const CostMatrix m = random_matrix(rows, 4 * rows, 1);
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_value(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinCostValue)->RangeMultiplier(2)->Range(4, 64)->Complexity();

// Lex tie-break re-solves per slot, so it costs one factor of rows more.
void BM_MinCostAssignment(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const CostMatrix m = random_matrix(rows, 4 * rows, 2);
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_assignment(m).total);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinCostAssignment)->RangeMultiplier(2)->Range(4, 32)->Complexity();

GeneratedInstance generated(int n, int k, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.seed = seed;
  return generate(cfg);
}

void BM_ProfileSolveByUsers(benchmark::State& state) {
  const auto g = generated(static_cast<int>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(g.instance).total_weight());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProfileSolveByUsers)->RangeMultiplier(2)->Range(50, 400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ProfileSolveByResources(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto g = generated(5 * k + 2, k, 1);
  ProfileSolveOptions opt;
  opt.user_cap = static_cast<std::size_t>(5 * k + 2);
  opt.max_profiles = kUnlimitedProfiles;
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(g.instance, opt).total_weight());
}
BENCHMARK(BM_ProfileSolveByResources)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_ProfileSolveNoBounds(benchmark::State& state) {
  const auto g = generated(50, 3, 1);
  ProfileSolveOptions opt;
  opt.node_bounds = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(g.instance, opt).total_weight());
}
BENCHMARK(BM_ProfileSolveNoBounds)->Unit(benchmark::kMillisecond);

void BM_SolveWsp(benchmark::State& state) {
  const auto g = generated(40, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_wsp(g.wsp).weight.total);
}
BENCHMARK(BM_SolveWsp)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
