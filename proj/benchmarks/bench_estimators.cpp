#include "radial/estimators.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

struct Problem {
    radial::Dataset data;
    radial::Covariate query;
    radial::NeighborProfile prof;
};

Problem make_problem(std::size_t n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<radial::LabeledPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        const int y = u(rng) < x[0] ? 1 : 0;
        pts.emplace_back(radial::Covariate(std::move(x)), y);
    }
    radial::Dataset data(std::move(pts));
    radial::Covariate query{0.1, -0.2, 0.3};
    radial::NeighborProfile prof = radial::profile(data, radial::Metric{}, query);
    return {std::move(data), std::move(query), std::move(prof)};
}

void run(benchmark::State& state, const radial::EstimatorSpec& spec) {
    const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(radial::estimate(spec, p.prof, p.data, p.query).value);
    }
}

void BM_Knn(benchmark::State& state) { run(state, radial::KnnSpec{30}); }
void BM_Lpor(benchmark::State& state) { run(state, radial::LporSpec{0.4, 2}); }
void BM_Lpolr(benchmark::State& state) { run(state, radial::LpolrSpec{0.4, 2, {}}); }
void BM_Msknn(benchmark::State& state) {
    run(state, radial::MsknnSpec{{10, 20, 30, 40, 50}, 2, radial::Regression::logi, radial::Loss::logistic, {}});
}
void BM_Lrlr(benchmark::State& state) { run(state, radial::LrrOptions{}); }

BENCHMARK(BM_Knn)->Arg(500);
BENCHMARK(BM_Lpor)->Arg(500);
BENCHMARK(BM_Lpolr)->Arg(500);
BENCHMARK(BM_Msknn)->Arg(500);
BENCHMARK(BM_Lrlr)->Arg(500)->Arg(2000);

void BM_Profile(benchmark::State& state) {
    const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(radial::profile(p.data, radial::Metric{}, p.query));
    }
}
BENCHMARK(BM_Profile)->Arg(500)->Arg(5000);

} // namespace
