#include "evo/mixed_type.hpp"
#include "evo/weighted_calculus.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace evo;

namespace {

Trajectory smooth_signal(const TimeGrid& g, int dim) {
    Trajectory u(g, dim);
    for (int k = 0; k <= g.n; ++k) {
        const double t = g.t(k);
        for (int i = 0; i < dim; ++i) u.col(k)(i) = std::sin(t * (1.0 + 0.1 * i));
    }
    return u;
}

void bm_weighted_inner(benchmark::State& state) {
    const TimeGrid g{0.0, 4.0, static_cast<int>(state.range(0))};
    const Weight w{1.0};
    const Trajectory u = smooth_signal(g, 8);
    const Trajectory v = smooth_signal(g, 8);
    for (auto _ : state) benchmark::DoNotOptimize(weighted_inner(u, v, w));
}
BENCHMARK(bm_weighted_inner)->Arg(256)->Arg(1024)->Arg(4096);

void bm_d0_inv(benchmark::State& state) {
    const TimeGrid g{0.0, 4.0, static_cast<int>(state.range(0))};
    const Trajectory u = smooth_signal(g, 8);
    for (auto _ : state) benchmark::DoNotOptimize(d0_inv(u));
}
BENCHMARK(bm_d0_inv)->Arg(256)->Arg(1024)->Arg(4096);

void bm_fourier_laplace(benchmark::State& state) {
    const TimeGrid g{0.0, 4.0, static_cast<int>(state.range(0))};
    const Weight w{1.0};
    const Trajectory u = smooth_signal(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fourier_laplace(u, w));
}
BENCHMARK(bm_fourier_laplace)->Arg(128)->Arg(256)->Arg(512);

void bm_mixed_type_solve(benchmark::State& state) {
    const MixedTypeConfig cfg{0.25, 1.0, static_cast<int>(state.range(0)), false};
    const TimeGrid g{0.0, 2.0, 256};
    Trajectory f(g, 2 * cfg.m);
    for (int k = 0; k <= g.n; ++k) f.col(k).setOnes();
    EvoProblem p = build_mixed_type(cfg, Weight{2.0}, g, f);
    p.cert = p.require_certificate();
    for (auto _ : state) benchmark::DoNotOptimize(solve(p).u);
}
BENCHMARK(bm_mixed_type_solve)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
