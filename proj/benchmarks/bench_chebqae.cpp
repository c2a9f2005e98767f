// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "chebqae/chebyshev.hpp"
#include "chebqae/lsm.hpp"
#include "chebqae/market.hpp"
#include "chebqae/pricer.hpp"
#include "chebqae/qae.hpp"
#include "chebqae/random.hpp"

namespace {

using namespace chebqae;

std::vector<double> grid_values(const HyperRectangle& domain, int m) {
  const auto grid = tensor_grid(domain, m);
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double total = 0.0;
    for (const double x : grid[j]) total += x;
    values[j] = std::exp(-0.01 * total);
  }
  return values;
}

void BM_FitInterpolant1D(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const HyperRectangle domain({80.0}, {125.0});
  const auto values = grid_values(domain, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_interpolant(domain, m, values));
  }
}
BENCHMARK(BM_FitInterpolant1D)->Arg(8)->Arg(16)->Arg(32);

void BM_FitInterpolant2D(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const HyperRectangle domain({80.0, 40.0}, {125.0, 60.0});
  const auto values = grid_values(domain, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_interpolant(domain, m, values));
  }
}
BENCHMARK(BM_FitInterpolant2D)->Arg(4)->Arg(8)->Arg(16);

void BM_EvalInterpolant(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const HyperRectangle domain({80.0, 40.0}, {125.0, 60.0});
  const auto interp = fit_interpolant(domain, m, grid_values(domain, m));
  const std::vector<double> point{97.25, 51.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(interp(point));
  }
}
BENCHMARK(BM_EvalInterpolant)->Arg(4)->Arg(8)->Arg(16);

void BM_OutcomeDistribution(benchmark::State& state) {
  const int m_grover = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qae_outcome_distribution(0.3174, m_grover));
  }
}
BENCHMARK(BM_OutcomeDistribution)->Arg(64)->Arg(1024)->Arg(16384);

void BM_MedianQae(benchmark::State& state) {
  const QAEConfig cfg{static_cast<int>(state.range(0)), 85};
  for (auto _ : state) {
    auto rng = substream(17u, 1u, 1u);
    benchmark::DoNotOptimize(run_median_qae(0.53, cfg, rng));
  }
}
BENCHMARK(BM_MedianQae)->Arg(702)->Arg(3162);

PricerConfig toy_config(bool exact) {
  PricerConfig cfg;
  cfg.degrees = {8};
  cfg.schedules = {QAEConfig{3162, 85}, QAEConfig{1633, 85}};
  cfg.value_bounds = {100.0, 100.0};
  cfg.exact_probabilities = exact;
  return cfg;
}

void BM_BackwardInduce(benchmark::State& state) {
  GBMModel model;
  model.spot = {100.0};
  model.vols = {0.2};
  model.correlation = {{1.0}};
  model.exercise_times = {0.5, 1.0};
  const TransitionKernel kernel(model, static_cast<int>(state.range(0)));
  const Payoff put{PayoffKind::put, 100.0};
  PricerConfig cfg = toy_config(false);
  cfg.boundary = BoundaryPolicy::flat_put(default_domains(model), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_induce(kernel, put, cfg, 7u));
  }
}
BENCHMARK(BM_BackwardInduce)->Arg(4)->Arg(32);

void BM_LsmPrice(benchmark::State& state) {
  GBMModel model;
  model.spot = {100.0};
  model.vols = {0.2};
  model.correlation = {{1.0}};
  model.exercise_times = {0.5, 1.0};
  const TransitionKernel kernel(model, 4);
  const Payoff put{PayoffKind::put, 100.0};
  const LSMConfig cfg{state.range(0), 5, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lsm_price(kernel, put, cfg));
  }
}
BENCHMARK(BM_LsmPrice)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
