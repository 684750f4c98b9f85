// Serial reference vs OpenMP table kernels on the hot loops: table fill,
// log-sum-exp application, max-plus sweep. Arity 2 runs a window-1 state
// space, arity 3 the window-2 indexing path.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "xylab/kernels.hpp"

using namespace xylab;

namespace {

Potential bench_potential(int arity) {
    if (arity == 2) return Potential::xy_pinned(0.5);
    return Potential::fourier(3, {{{1, -1, 0}, 1.0, 0.0}, {{0, 1, -1}, 0.5, 0.0}, {{1, 0, 1}, 0.0, 0.25}});
}

struct Workload {
    Potential f;
    FiberGrid grid;
    StateSpace ss;
    std::vector<double> table, in, out;

    Workload(int n, int arity)
        : f(bench_potential(arity)), grid(FiberGrid::uniform(n)), ss(StateSpace::make(grid, arity)) {
        fill_log_kernel(f, 10.0, grid, ss, table);
        in.resize(static_cast<size_t>(ss.n_states()));
        for (size_t i = 0; i < in.size(); ++i) in[i] = 0.05 * std::cos(static_cast<double>(i));
        out.resize(in.size());
    }

    long items() const { return ss.n_states() * ss.n_letters(); }
};

void BM_fill(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        fill_log_kernel(w.f, 10.0, w.grid, w.ss, w.table);
        benchmark::DoNotOptimize(w.table.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void BM_fill_serial(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        serial::fill_log_kernel(w.f, 10.0, w.grid, w.ss, w.table);
        benchmark::DoNotOptimize(w.table.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void BM_lse_apply(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        lse_apply(w.table, w.ss, w.in, w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void BM_lse_apply_serial(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        serial::lse_apply(w.table, w.ss, w.in, w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void BM_maxplus_sweep(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        maxplus_sweep(w.table, w.ss, w.in, w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void BM_maxplus_sweep_serial(benchmark::State& state) {
    Workload w(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        serial::maxplus_sweep(w.table, w.ss, w.in, w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    state.SetItemsProcessed(state.iterations() * w.items());
}

void shapes(benchmark::internal::Benchmark* b) {
    b->ArgNames({"n", "arity"})
        ->Args({64, 2})
        ->Args({256, 2})
        ->Args({1024, 2})
        ->Args({128, 3})
        ->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_fill)->Apply(shapes);
BENCHMARK(BM_fill_serial)->Apply(shapes);
BENCHMARK(BM_lse_apply)->Apply(shapes);
BENCHMARK(BM_lse_apply_serial)->Apply(shapes);
BENCHMARK(BM_maxplus_sweep)->Apply(shapes);
BENCHMARK(BM_maxplus_sweep_serial)->Apply(shapes);

BENCHMARK_MAIN();
