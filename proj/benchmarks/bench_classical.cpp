#include "tsf/decomposition.hpp"
#include "tsf/ets.hpp"
#include "tsf/sarima.hpp"
#include "tsf/stats_tests.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

// Winter-peaking monthly counts on a slow random walk.
tsf::TimeSeries seasonal_series(std::size_t n, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(n);
    double walk = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        walk += 400.0 * z(rng);
        y[t] = 20000.0 + walk + 6000.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 12.0) + 800.0 * z(rng);
    }
    return tsf::TimeSeries({2009, 1}, std::move(y), 12);
}

void BM_MannKendall(benchmark::State& state) {
    const auto ts = seasonal_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tsf::stats::mann_kendall(ts.values()));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MannKendall)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_KruskalWallisSeasonality(benchmark::State& state) {
    const auto ts = seasonal_series(180);
    for (auto _ : state) benchmark::DoNotOptimize(tsf::stats::kruskal_wallis_seasonality(ts));
}
BENCHMARK(BM_KruskalWallisSeasonality);

void BM_Kpss(benchmark::State& state) {
    const auto ts = seasonal_series(168);
    for (auto _ : state) benchmark::DoNotOptimize(tsf::stats::kpss_level(ts.values(), 4));
}
BENCHMARK(BM_Kpss);

void BM_ClassicalDecompose(benchmark::State& state) {
    const auto ts = seasonal_series(180);
    for (auto _ : state) benchmark::DoNotOptimize(tsf::classical_additive_decompose(ts));
}
BENCHMARK(BM_ClassicalDecompose);

void BM_HoltWintersFit(benchmark::State& state) {
    const auto ts = seasonal_series(168);
    for (auto _ : state) benchmark::DoNotOptimize(tsf::ets::fit_holt_winters(ts));
}
BENCHMARK(BM_HoltWintersFit)->Unit(benchmark::kMillisecond);

void BM_SarimaFit(benchmark::State& state) {
    const auto ts = seasonal_series(168);
    const tsf::sarima::SarimaOrder order{0, 1, 3, 0, 0, 1, 12, false};
    for (auto _ : state) benchmark::DoNotOptimize(tsf::sarima::fit(ts, order));
}
BENCHMARK(BM_SarimaFit)->Unit(benchmark::kMillisecond);

void BM_SarimaGrid(benchmark::State& state) {
    const auto ts = seasonal_series(168);
    const auto candidates = tsf::sarima::tentative_influenza_candidates();
    for (auto _ : state) benchmark::DoNotOptimize(tsf::sarima::grid_search(ts, candidates));
}
BENCHMARK(BM_SarimaGrid)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace
