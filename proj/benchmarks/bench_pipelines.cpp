#include <benchmark/benchmark.h>

#include "pir/pir.hpp"

namespace {

pir::SimulationConfig s3i3r_run(double t_end) {
    pir::SimulationConfig c;
    c.t_end = t_end;
    c.step = 1.0;
    c.initial_state = pir::Vector(7);
    c.initial_state << 5.6e6, 1e5, 1000, 10, 0, 0, 0;
    pir::Vector omega(8);
    omega << 0.3, 0.2, 0.05, 0.05, 0.0, 0.1, 0.01, 0.05;
    c.schedule = pir::ParameterSchedule::constant(omega);
    return c;
}

void BM_SimulateS3i3r(benchmark::State& state) {
    const auto model = pir::s3i3r_model(5.701010e6);
    const auto config = s3i3r_run(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pir::simulate(model, config));
}
BENCHMARK(BM_SimulateS3i3r)->Arg(100)->Arg(1000);

void BM_SweepDraw(benchmark::State& state) {
    const auto config = s3i3r_run(100.0);
    const auto model = pir::s3i3r_model(config.initial_state.sum());
    pir::SweepSpec spec;
    spec.domain = {{"beta", 0, 0.5},   {"gamma1", 0, 0.3}, {"gamma2", 0, 0.3}, {"gamma3", 0, 0.3},
                   {"phi1", 0, 0.03}, {"phi2", 0, 0.3},   {"theta", 0, 0.5}};
    spec.fixed_parameters = {{"tau", 0.0}};
    spec.sample_count = 1;
    spec.threads = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        spec.seed = seed++;
        benchmark::DoNotOptimize(pir::run_sweep(model, spec, config, {1, 99}));
    }
}
BENCHMARK(BM_SweepDraw);

void BM_TimeVaryingSir(benchmark::State& state) {
    const auto model = pir::sir_model(1.0);
    pir::SimulationConfig c;
    c.t_end = 200.0;
    c.step = 1.0;
    c.initial_state = Eigen::Vector3d(0.9999, 1e-4, 0.0);
    c.schedule = pir::ParameterSchedule::sinusoidal(Eigen::Vector2d(0.4, 1.0 / 3.0), 0, 0.4, 0.05, 70.0);
    const auto series = pir::simulate(model, c);
    const auto partition = pir::ParameterPartition::all_unknown(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            pir::estimate_time_varying(model, series, static_cast<std::size_t>(state.range(0)), partition));
    }
}
BENCHMARK(BM_TimeVaryingSir)->Arg(1)->Arg(14);

void BM_AssembleVorticity(benchmark::State& state) {
    const auto stack = pir::manufactured_diffusion_stack(0.01, 129, 129, 51, 0.05);
    const auto sensors =
        pir::sample_sensors(stack, pir::default_wake_region(stack), static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(pir::assemble_vorticity_system(stack, sensors));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 49);
}
BENCHMARK(BM_AssembleVorticity)->Arg(4)->Arg(64)->Arg(1024);

void BM_EstimateReynolds(benchmark::State& state) {
    const auto stack = pir::manufactured_diffusion_stack(0.01, 129, 129, 51, 0.05);
    pir::ReynoldsOptions opts;
    opts.sensor_counts = {64};
    opts.repeats = 20;
    opts.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(pir::estimate_reynolds(stack, pir::default_wake_region(stack), opts));
}
BENCHMARK(BM_EstimateReynolds);

}  // namespace
