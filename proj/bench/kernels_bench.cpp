// Serial reference vs OpenMP kernels on graded grids of increasing size.
#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "sollab/grid.hpp"
#include "sollab/kernels.hpp"

using namespace sollab;

namespace {

struct Setup {
    GridPtr grid;
    kernels::LaplacianStencil stencil;
    std::vector<double> u, v, du, dv;

    explicit Setup(double nodes_per_decade)
        : grid(make_graded(1e-3, nodes_per_decade, 1e4)), stencil(*grid, 3) {
        const std::size_t n = grid->size();
        u.resize(n);
        v.resize(n);
        du.resize(n);
        dv.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid->r(i);
            u[i] = 1.0 / std::pow(1.0 + r * r / 24.0, 2);
            v[i] = std::exp(-r * r);
        }
    }
};

template <bool Parallel>
void bm_rhs(benchmark::State& state) {
    Setup s(static_cast<double>(state.range(0)));
    const kernels::WaveRhs op{&s.stencil, kernels::Source::quadratic, {}};
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::rhs_parallel(op, s.u, s.v, s.du, s.dv);
        else
            kernels::rhs_serial(op, s.u, s.v, s.du, s.dv);
        benchmark::DoNotOptimize(s.dv.data());
    }
    state.counters["nodes"] = static_cast<double>(s.grid->size());
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(s.grid->size()));
}

template <bool Parallel>
void bm_axpy(benchmark::State& state) {
    Setup s(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::axpy_parallel(s.u, 0.5, s.v, s.du);
        else
            kernels::axpy_serial(s.u, 0.5, s.v, s.du);
        benchmark::DoNotOptimize(s.du.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(s.grid->size()));
}

template <bool Parallel>
void bm_rk4_combine(benchmark::State& state) {
    Setup s(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::rk4_combine_parallel(s.du, 1e-3, s.u, s.v, s.u, s.v);
        else
            kernels::rk4_combine_serial(s.du, 1e-3, s.u, s.v, s.u, s.v);
        benchmark::DoNotOptimize(s.du.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(s.grid->size()));
}

template <bool Parallel>
void bm_rk4_step(benchmark::State& state) {
    Setup s(static_cast<double>(state.range(0)));
    kernels::Rk4Stepper stepper({&s.stencil, kernels::Source::quadratic, {}}, s.grid->size(), Parallel);
    const double dt = 0.25 * s.grid->min_spacing();
    for (auto _ : state) {
        stepper.step(s.u, s.v, dt);
        benchmark::DoNotOptimize(s.u.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(s.grid->size()));
}

} // namespace

#define SIZES ->RangeMultiplier(4)->Range(64, 4096)

BENCHMARK(bm_rhs<false>) SIZES;
BENCHMARK(bm_rhs<true>) SIZES;
BENCHMARK(bm_axpy<false>) SIZES;
BENCHMARK(bm_axpy<true>) SIZES;
BENCHMARK(bm_rk4_combine<false>) SIZES;
BENCHMARK(bm_rk4_combine<true>) SIZES;
BENCHMARK(bm_rk4_step<false>) SIZES;
BENCHMARK(bm_rk4_step<true>) SIZES;

BENCHMARK_MAIN();
