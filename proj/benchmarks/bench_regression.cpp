#include <random>

#include <benchmark/benchmark.h>

#include "pir/regression.hpp"

namespace {

pir::StackedSystem random_system(Eigen::Index rows, Eigen::Index cols) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    pir::Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = z(rng);
    }
    pir::Vector w = pir::Vector::LinSpaced(cols, 0.1, 1.0);
    return {a, a * w};
}

void BM_SolveOls(benchmark::State& state) {
    const auto system = random_system(state.range(0), state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(pir::solve_ols(system));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolveOls)->Args({150, 2})->Args({700, 8})->Args({20000, 1});

void BM_SolveRidgeNormalized(benchmark::State& state) {
    const auto system = random_system(state.range(0), state.range(1));
    pir::SolveOptions opts;
    opts.normalize_columns = true;
    for (auto _ : state) benchmark::DoNotOptimize(pir::solve_ridge(system, 1e-6, opts));
}
BENCHMARK(BM_SolveRidgeNormalized)->Args({700, 8});

}  // namespace
