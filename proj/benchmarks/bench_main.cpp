#include <harmflow/harmflow.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace harmflow;

namespace {

Scenario filtered_scenario() {
    const double q[] = {106.2, 107.8, 108.3, 105.1};
    Scenario s;
    s.bank = design_bank_six_pulse(s.basis, 11.09e-6, q, 858.3679859858704, 2.970240676899715).value;
    return s;
}

void BM_SimulateBaseline(benchmark::State& state) {
    Scenario s;
    s.solver.duration_s = 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(run(s));
}
BENCHMARK(BM_SimulateBaseline)->Unit(benchmark::kMillisecond);

void BM_SimulateFiltered(benchmark::State& state) {
    Scenario s = filtered_scenario();
    s.solver.duration_s = 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(run(s));
}
BENCHMARK(BM_SimulateFiltered)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * 1e-5;
        x[k] = std::sin(2.0 * std::numbers::pi * 50.0 * t) + 0.2 * std::sin(2.0 * std::numbers::pi * 250.0 * t);
    }
    for (auto _ : state) benchmark::DoNotOptimize(spectrum(x, 1e5, 50.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Spectrum)->Arg(2000)->Arg(10000)->Arg(50000);

void BM_Scan(benchmark::State& state) {
    const auto bank = *filtered_scenario().bank;
    for (auto _ : state) {
        const auto curve = scan(bank, 0.0016, 50.0, 1000.0, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(find_resonances(curve));
    }
}
BENCHMARK(BM_Scan)->Arg(951)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
