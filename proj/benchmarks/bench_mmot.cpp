// Microbenchmarks for the hot paths: Sinkhorn sweeps, the transportation LP,
// Jacobi eigendecomposition, and the block-approximation pipeline.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include <mmot/analysis.hpp>
#include <mmot/approx.hpp>
#include <mmot/costs.hpp>
#include <mmot/entropic.hpp>
#include <mmot/exact.hpp>
#include <mmot/matrix.hpp>
#include <mmot/measures.hpp>

namespace {

mmot::ProductSpace two_marginal_space(std::size_t n) {
  auto mu = mmot::grid_marginal({0.0}, {1.0}, n, "uniform");
  auto nu = mmot::grid_marginal({0.0}, {1.0}, n, "cos2");
  return mmot::make_space({mu, nu});
}

mmot::ProductSpace three_marginal_space(std::size_t n) {
  auto m1 = mmot::grid_marginal({0.0}, {1.0}, n, "uniform");
  auto m2 = mmot::grid_marginal({0.0}, {1.0}, n, "cos2");
  auto m3 = mmot::grid_marginal({0.15}, {0.85}, n, "cos2");
  return mmot::make_space({m1, m2, m3});
}

void BM_SinkhornTwoMarginal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto space = two_marginal_space(n);
  auto cost = mmot::evaluate_on_grid(mmot::make_quadratic2(1), space);
  mmot::SinkhornConfig cfg;
  cfg.epsilon = 0.05;
  for (auto _ : state) {
    auto sol = mmot::sinkhorn_solve(space, cost, cfg);
    benchmark::DoNotOptimize(sol.dual_value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_SinkhornTwoMarginal)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SinkhornThreeMarginal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto space = three_marginal_space(n);
  auto cm = mmot::make_gangbo_swiech(3, 1);
  mmot::configure_shift(cm, space);
  auto cost = mmot::evaluate_on_grid(cm, space);
  mmot::SinkhornConfig cfg;
  cfg.epsilon = 0.1;
  for (auto _ : state) {
    auto sol = mmot::sinkhorn_solve(space, cost, cfg);
    benchmark::DoNotOptimize(sol.dual_value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}
BENCHMARK(BM_SinkhornThreeMarginal)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_LPTwoMarginal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto space = two_marginal_space(n);
  auto cost = mmot::evaluate_on_grid(mmot::make_quadratic2(1), space);
  for (auto _ : state) {
    auto sol = mmot::lp_solve(space, cost);
    benchmark::DoNotOptimize(sol.value);
  }
}
BENCHMARK(BM_LPTwoMarginal)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LPThreeMarginal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto space = three_marginal_space(n);
  auto cm = mmot::make_gangbo_swiech(3, 1);
  mmot::configure_shift(cm, space);
  auto cost = mmot::evaluate_on_grid(cm, space);
  for (auto _ : state) {
    auto sol = mmot::lp_solve(space, cost);
    benchmark::DoNotOptimize(sol.value);
  }
}
BENCHMARK(BM_LPThreeMarginal)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_JacobiEigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  mmot::Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = u(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  for (auto _ : state) {
    auto ev = mmot::jacobi_eigenvalues(a);
    benchmark::DoNotOptimize(ev.data());
  }
}
BENCHMARK(BM_JacobiEigen)->Arg(6)->Arg(12)->Arg(24)->Arg(48);

void BM_BlockApproximation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto space = two_marginal_space(n);
  auto cost = mmot::evaluate_on_grid(mmot::make_quadratic2(1), space);
  auto lp = mmot::lp_solve(space, cost);
  std::vector<mmot::BoxPartition> parts;
  for (const auto& marg : space.marginals)
    parts.push_back(mmot::box_partition(marg, 0.1));
  for (auto _ : state) {
    auto plan = mmot::block_approximation(lp.coupling, parts);
    benchmark::DoNotOptimize(plan.block_masses.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_BlockApproximation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
