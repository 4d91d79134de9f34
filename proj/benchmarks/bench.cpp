#include <benchmark/benchmark.h>

#include "cosim/analysis.hpp"
#include "cosim/builtin_models.hpp"
#include "cosim/builtin_scenarios.hpp"
#include "cosim/orchestration.hpp"

namespace {

using namespace cosim;

void BM_MatExp8(benchmark::State& state) {
    const auto [model, drive] = models::chain_monolithic();
    const Matrix a = augment_affine(model.A, drive.b);
    for (auto _ : state) benchmark::DoNotOptimize(mat_exp(a, 0.01));
}
BENCHMARK(BM_MatExp8);

void BM_SpectralRadius8(benchmark::State& state) {
    const auto [model, drive] = models::chain_monolithic();
    const Matrix a = augment_affine(model.A, drive.b);
    const Matrix step = Matrix::identity(8) + 1e-3 * a;
    for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(step));
}
BENCHMARK(BM_SpectralRadius8);

void BM_GaussSeidelChain(benchmark::State& state) {
    for (auto _ : state) {
        Trace t = run_gauss_seidel(scenarios::car_passenger());
        benchmark::DoNotOptimize(t.times.back());
    }
}
BENCHMARK(BM_GaussSeidelChain);

void BM_JacobiSplitMsd(benchmark::State& state) {
    for (auto _ : state) {
        Trace t = run_jacobi(scenarios::split_msd(1e-4, 0.1, StepperKind::ExplicitEuler,
                                                  OrchestratorKind::Jacobi, 40.0));
        benchmark::DoNotOptimize(t.times.back());
    }
}
BENCHMARK(BM_JacobiSplitMsd);

void BM_IterativeGaussSeidelLoop(benchmark::State& state) {
    for (auto _ : state) {
        Scenario s = scenarios::split_msd(1e-4, 0.1, StepperKind::ExplicitEuler,
                                          OrchestratorKind::IterativeGaussSeidel, 10.0);
        s.orchestrator.convergence.epsilon = 1e-10;
        Trace t = run_iterative_gauss_seidel(std::move(s));
        benchmark::DoNotOptimize(t.iterations_per_step.back());
    }
}
BENCHMARK(BM_IterativeGaussSeidelLoop);

} // namespace

BENCHMARK_MAIN();
