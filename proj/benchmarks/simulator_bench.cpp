#include <benchmark/benchmark.h>

#include "rsinsure/coefficients.hpp"
#include "rsinsure/simulator.hpp"

using namespace rsinsure;

namespace {

void BM_SimulatePath(benchmark::State& state) {
    const MarketModel m = parameter_set("I").delta(0.25).loss(LossModel::constant(0.3)).build();
    const PolicyBundle b = make_policy_bundle(m, solve(m, UtilitySpec::negative_power(-1.0)));
    SimulationConfig c;
    c.horizon = 200.0;
    c.dt = 1.0 / static_cast<double>(state.range(0));
    std::size_t path = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_wealth_path(m, b, 1.0, 0, c, path++));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(c.horizon * state.range(0)));
}
BENCHMARK(BM_SimulatePath)->Arg(100)->Arg(500);

void BM_EstimateValue(benchmark::State& state) {
    const MarketModel m = parameter_set("I").delta(0.25).loss(LossModel::uniform()).build();
    const PolicyBundle b = make_policy_bundle(m, solve(m, UtilitySpec::log()));
    SimulationConfig c;
    c.paths = 1000;
    c.dt = 1.0 / 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_value(m, b, 4.0, 0, c));
}
BENCHMARK(BM_EstimateValue)->Unit(benchmark::kMillisecond);

}  // namespace
