#include <benchmark/benchmark.h>

#include "riccati/fbsde.hpp"
#include "riccati/reference_systems.hpp"
#include "riccati/spectrum.hpp"

using namespace riccati;

static void BM_IntegratePrimal(benchmark::State& state) {
    CoefficientSet d = diagonal_system();
    for (auto _ : state) {
        auto sol = integrate_primal(d, 30.0, 1.0, 0.0, {});
        benchmark::DoNotOptimize(sol.termination.t);
    }
}
BENCHMARK(BM_IntegratePrimal);

static void BM_ComputeChain(benchmark::State& state) {
    CoefficientSet d = diagonal_system();
    double lambda = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto ch = compute_chain(d, lambda, {});
        benchmark::DoNotOptimize(ch.depth());
    }
}
BENCHMARK(BM_ComputeChain)->Arg(10)->Arg(100)->Arg(1000);

static void BM_EnumerateDiagonal(benchmark::State& state) {
    CoefficientSet d = diagonal_system();
    for (auto _ : state) {
        auto eigs = enumerate_eigenvalues(d, 100.0);
        benchmark::DoNotOptimize(eigs.size());
    }
}
BENCHMARK(BM_EnumerateDiagonal);

static void BM_SimulatePaths(benchmark::State& state) {
    CoefficientSet d = diagonal_system();
    Eigenvalue e = solve_eigenvalue(d, {2.0, 5.0}, RootSpec::chain_time_root(1), 1e-9);
    for (auto _ : state) {
        auto sim = simulate_eigenfunction(d, e, 1024, static_cast<int>(state.range(0)), 1, 1.0);
        benchmark::DoNotOptimize(sim.paths.size());
    }
}
BENCHMARK(BM_SimulatePaths)->Arg(4)->Arg(32);

BENCHMARK_MAIN();
