// Microbenchmarks for the hot numerical paths: transform solves, limit
// evaluations, Legendre refinement, discretization, sampling kernels, and the
// randomized-rotation spectrum draw that dominates the experiment runtimes.
#include <benchmark/benchmark.h>

#include "spherint/asymptote.hpp"
#include "spherint/measure.hpp"
#include "spherint/montecarlo.hpp"
#include "spherint/ratefn.hpp"
#include "spherint/rng.hpp"
#include "spherint/transform.hpp"

using namespace spherint;

namespace {

const ToleranceConfig tol = default_tolerances();

const AtomicMeasure& semicircle(int n) {
    static const AtomicMeasure s400 = AtomicMeasure::semicircle_grid(400);
    static const AtomicMeasure s10k = AtomicMeasure::semicircle_grid(10000);
    return n == 400 ? s400 : s10k;
}

void BM_hilbert(benchmark::State& state) {
    const auto& m = semicircle(static_cast<int>(state.range(0)));
    double z = 2.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hilbert(m, z));
        z = (z == 2.5) ? 3.0 : 2.5; // defeat value caching by the optimizer
    }
}
BENCHMARK(BM_hilbert)->Arg(400)->Arg(10000);

void BM_r_transform(benchmark::State& state) {
    const auto& m = semicircle(static_cast<int>(state.range(0)));
    double g = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(r_transform(m, g, tol));
        g = (g == 0.5) ? 0.45 : 0.5;
    }
}
BENCHMARK(BM_r_transform)->Arg(400)->Arg(10000);

void BM_rank_one_limit_interior(benchmark::State& state) {
    const auto& m = semicircle(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(rank_one_limit(m, 0.3, 1, tol).value);
}
BENCHMARK(BM_rank_one_limit_interior)->Arg(400)->Arg(10000);

void BM_rank_one_limit_saturated(benchmark::State& state) {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    for (auto _ : state)
        benchmark::DoNotOptimize(rank_one_limit(t, 1.5, 1, tol).value);
}
BENCHMARK(BM_rank_one_limit_saturated);

void BM_quadrature_identity(benchmark::State& state) {
    const auto& m = semicircle(400);
    for (auto _ : state)
        benchmark::DoNotOptimize(small_theta_integral(m, 0.3, 1, tol));
}
BENCHMARK(BM_quadrature_identity);

void BM_legendre_sup(benchmark::State& state) {
    const auto t = AtomicMeasure::trimmed_bernoulli();
    for (auto _ : state)
        benchmark::DoNotOptimize(legendre_sup(t, 0.4, tol).value);
}
BENCHMARK(BM_legendre_sup);

void BM_taylor_coefficients(benchmark::State& state) {
    const auto b = AtomicMeasure::bernoulli(-1.0, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(taylor_coefficients(b, 4, tol));
}
BENCHMARK(BM_taylor_coefficients);

void BM_quantile_discretize(benchmark::State& state) {
    const auto big = AtomicMeasure::semicircle_grid(100000);
    for (auto _ : state)
        benchmark::DoNotOptimize(quantile_discretize(big, 1000));
}
BENCHMARK(BM_quantile_discretize);

void BM_normal_stream(benchmark::State& state) {
    NormalStream rng(1, 0);
    double acc = 0.0;
    for (auto _ : state) acc += rng.next();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_normal_stream);

void BM_mc_log_integral(benchmark::State& state) {
    const auto e = quantile_discretize(AtomicMeasure::bernoulli(-1.0, 1.0), 200);
    McConfig cfg;
    cfg.samples = 2000;
    cfg.seed = 7;
    cfg.method = state.range(0) ? McMethod::Tilted : McMethod::Direct;
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_log_integral(e, 0.2, cfg, tol).value);
}
BENCHMARK(BM_mc_log_integral)->Arg(0)->Arg(1);

void BM_free_conv_spectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto a = quantile_discretize(AtomicMeasure::bernoulli(-1.0, 1.0), n);
    NormalStream rng(3, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(free_conv_spectrum(a, a, rng, tol));
}
BENCHMARK(BM_free_conv_spectrum)->Arg(50)->Arg(100)->Arg(200)
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
