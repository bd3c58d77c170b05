/** @file bench_pricing.cpp */
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bidstack/bid_stack.hpp"
#include "bidstack/forward_pricing.hpp"
#include "bidstack/gauss_kernel.hpp"
#include "bidstack/mc_oracle.hpp"
#include "bidstack/plant_valuation.hpp"
#include "bidstack/spread_pricing.hpp"

using namespace bidstack;

namespace {

PricingInputs inputs(double maturity) {
  ModelParameters p;
  p.dynamics.varrho = -0.8;
  return make_pricing_inputs(make_scenario(ScenarioId::I, p), maturity);
}

void BM_BinormCdf(benchmark::State& state) {
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(binorm_cdf(x, 0.3, 0.95));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_BinormCdf);

void BM_SpotTwoFuel(benchmark::State& state) {
  const ModelParameters p;
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spot_price_twofuel(p.coal, p.gas, d, 9.0, 11.0));
    d = d > 0.99 ? 0.0 : d + 1e-3;
  }
}
BENCHMARK(BM_SpotTwoFuel);

void BM_SpotNFuel(benchmark::State& state) {
  std::vector<FuelBid> bids;
  std::vector<double> prices;
  for (int i = 0; i < state.range(0); ++i) {
    bids.push_back(FuelBid{"f", 2.0 + 0.01 * i, 1.0, 1.0 / static_cast<double>(state.range(0))});
    prices.push_back(8.0 + 0.1 * i);
  }
  MarketSnapshot snap{0.0, prices};
  for (auto _ : state) {
    benchmark::DoNotOptimize(spot_price_nfuel(bids, snap));
    snap.demand = snap.demand > 0.99 ? 0.0 : snap.demand + 1e-3;
  }
}
BENCHMARK(BM_SpotNFuel)->Arg(2)->Arg(4)->Arg(8);

void BM_ForwardClosed(benchmark::State& state) {
  const PricingInputs in = inputs(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(forward_price_closed(in));
}
BENCHMARK(BM_ForwardClosed);

void BM_ForwardQuadrature(benchmark::State& state) {
  const PricingInputs in = inputs(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(forward_price_quadrature(in));
}
BENCHMARK(BM_ForwardQuadrature)->Unit(benchmark::kMillisecond);

void BM_SpreadClosed(benchmark::State& state) {
  const PricingInputs in = inputs(1.0);
  const SpreadSpec spec{SpreadLeg::dark, std::exp(2.25), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(spread_price_closed(in, spec));
}
BENCHMARK(BM_SpreadClosed);

void BM_McForward(benchmark::State& state) {
  const PricingInputs in = inputs(1.0);
  SimConfig cfg;
  cfg.n_paths = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc_forward(in, cfg));
}
BENCHMARK(BM_McForward)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_PlantExactHours(benchmark::State& state) {
  const ScenarioSpec sc = make_scenario(ScenarioId::I);
  PlantSpec plant;
  plant.hours = hourly_maturities(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plant_value(plant, sc, sc.base.demand, std::nullopt, {ValuationMode::exact}));
  }
}
BENCHMARK(BM_PlantExactHours)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
