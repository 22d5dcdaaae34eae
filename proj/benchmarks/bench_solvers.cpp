#include <benchmark/benchmark.h>

#include <random>

#include "riskmdp/riskmdp.hpp"

using namespace riskmdp;

namespace {

DiscreteDistribution random_law(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> atoms(n), probs(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    atoms[i] = 20.0 * u(rng) - 10.0;
    probs[i] = u(rng) + 1e-3;
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return DiscreteDistribution::make(atoms, probs);
}

RiskMeasure measure(int which) {
  switch (which) {
    case 0: return RiskMeasure::expectation();
    case 1: return RiskMeasure::value_at_risk(0.9);
    case 2: return RiskMeasure::expected_shortfall(0.9);
    default: return RiskMeasure::spectral(StepSpectrum::normalized({{0.0, 1.0}, {0.5, 3.0}}));
  }
}

void BM_Evaluate(benchmark::State& state) {
  const auto law = random_law(static_cast<std::size_t>(state.range(0)), 1);
  const auto rm = measure(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(rm, law));
  state.SetLabel(rm.describe());
}
BENCHMARK(BM_Evaluate)->ArgsProduct({{8, 64, 512}, {0, 1, 2, 3}});

CashBalanceParams cash(int radius) {
  CashBalanceParams p;
  p.radius = radius;
  p.holding = CashBalanceParams::quadratic(radius);
  p.shocks = {-2, -1, 0, 1, 2};
  p.shock_probs = {0.1, 0.2, 0.4, 0.2, 0.1};
  p.discount = 0.9;
  return p;
}

BoundingSpec spec_for(const MdpModel& m) {
  double k = 0.0;
  for (double c : m.cost_table()) k = std::max(k, std::abs(c));
  return BoundingSpec::constant(m.n_states(), k, 1.0, BoundingMode::Coherent);
}

void BM_BellmanT(benchmark::State& state) {
  const auto m = build_cash_balance(cash(static_cast<int>(state.range(0))));
  const auto rm = RiskMeasure::expected_shortfall(0.9);
  ValueFunction v{std::vector<double>(m.n_states(), 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(bellman_T(m, rm, v));
  state.counters["states"] = static_cast<double>(m.n_states());
}
BENCHMARK(BM_BellmanT)->Arg(10)->Arg(25)->Arg(50);

void BM_SolveInfinite(benchmark::State& state) {
  const auto m = build_cash_balance(cash(static_cast<int>(state.range(0))));
  const auto rm = RiskMeasure::expected_shortfall(0.9);
  const auto spec = spec_for(m);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto r = solve_infinite(m, rm, spec);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.value.values.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveInfinite)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_SolveFiniteCasino(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = build_casino({0.6, n, 4});
  const auto rm = RiskMeasure::expected_shortfall(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_finite(m, rm, n).values.data());
}
BENCHMARK(BM_SolveFiniteCasino)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
