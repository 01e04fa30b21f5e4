#include "radial/metric.hpp"
#include "radial/profile.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

std::vector<double> walk(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> v(n);
    double p = 100.0;
    for (double& x : v) {
        p *= 1.0 + z(rng);
        x = p;
    }
    return v;
}

void BM_Dtw(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = walk(rng, n);
    const auto b = walk(rng, n + 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(radial::dtw(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNSquared);

void BM_IdtwProfile(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::vector<radial::LabeledPoint> pts;
    for (int i = 0; i < state.range(0); ++i) {
        pts.emplace_back(radial::Covariate(walk(rng, 21)), i % 2);
    }
    const radial::Dataset data(std::move(pts));
    const radial::Covariate query(walk(rng, 22));
    const radial::Metric metric{radial::MetricKind::idtw};
    for (auto _ : state) {
        benchmark::DoNotOptimize(radial::profile(data, metric, query));
    }
}
BENCHMARK(BM_IdtwProfile)->Arg(168)->Arg(192);

} // namespace
