// Serial reference vs OpenMP kernels on the hot loops.

#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bdvarmin/kernels.hpp"
#include "bdvarmin/spaces.hpp"

using namespace bdvarmin;

namespace {

ScalarSamples make_field(int n) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> d(0.0, 1.0);
    ScalarSamples u(n, n, 1.0 / (n - 1));
    for (auto& v : u.values) v = d(rng);
    return u;
}

void bm_gagliardo_serial(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::serial::gagliardo_double_sum(u.values, u.nx, u.ny, u.h, 0.5, 2.0));
    }
}

void bm_gagliardo_parallel(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::gagliardo_double_sum(u.values, u.nx, u.ny, u.h, 0.5, 2.0));
    }
}

void bm_cube_osc_serial(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::serial::cube_oscillation_table(u.values, u.nx, u.ny, 9));
    }
}

void bm_cube_osc_parallel(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::cube_oscillation_table(u.values, u.nx, u.ny, 9));
    }
}

void bm_window_max_serial(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::serial::window_max(u.values, u.nx, u.ny, 9, 9));
    }
}

void bm_window_max_parallel(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::window_max(u.values, u.nx, u.ny, 9, 9));
    }
}

void bm_doro_seminorm(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(doro_seminorm(u, 0.5, 2.0));
    }
}

void bm_sharp_maximal(benchmark::State& state) {
    const auto u = make_field(int(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(frac_sharp_maximal(u, 0.5));
    }
}

} // namespace

BENCHMARK(bm_gagliardo_serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gagliardo_parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_cube_osc_serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_cube_osc_parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_window_max_serial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_window_max_parallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_doro_seminorm)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sharp_maximal)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
