#include <benchmark/benchmark.h>

#include <array>
#include <cmath>

#include "ulln/distributions.hpp"
#include "ulln/engine.hpp"
#include "ulln/estimators.hpp"
#include "ulln/hfuncs.hpp"
#include "ulln/quadrature.hpp"

namespace {

const ulln::DistributionSpec kLaplace{ulln::Family::laplace, 0.0, 1.0};

void BM_DrawSample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(ulln::draw_sample(kLaplace, n, seed++));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawSample)->Arg(50)->Arg(3200);

void BM_Median(benchmark::State& state) {
    const auto sample = ulln::draw_sample(kLaplace, static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(ulln::median(sample));
}
BENCHMARK(BM_Median)->Arg(51)->Arg(3201);

void BM_SignMEstimate(benchmark::State& state) {
    const auto sample = ulln::draw_sample(kLaplace, static_cast<std::size_t>(state.range(0)), 5);
    const auto e = ulln::make_estimator("sign-m");
    for (auto _ : state) benchmark::DoNotOptimize(ulln::m_estimate(sample, e));
}
BENCHMARK(BM_SignMEstimate)->Arg(51)->Arg(3201);

void BM_EmpiricalHMean(benchmark::State& state) {
    const auto sample = ulln::draw_sample(kLaplace, static_cast<std::size_t>(state.range(0)), 9);
    const auto h = ulln::make_h("signlog", ulln::flagship_envelope(1.0));
    for (auto _ : state) benchmark::DoNotOptimize(ulln::empirical_h_mean(sample, 0.1, h));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalHMean)->Arg(3200);

void BM_LogSingularityQuadrature(benchmark::State& state) {
    const ulln::Integrand f = [](double u) { return std::fabs(std::log(std::fabs(u))); };
    const std::array<double, 1> breaks{0.0};
    for (auto _ : state) benchmark::DoNotOptimize(ulln::integrate(f, -1.0, 1.0, breaks));
}
BENCHMARK(BM_LogSingularityQuadrature);

void BM_L1Curve(benchmark::State& state) {
    ulln::SimulationPlan plan;
    plan.dist = kLaplace;
    plan.h = ulln::make_h("signlog", ulln::flagship_envelope(1.0));
    plan.estimator = ulln::make_estimator("median");
    plan.n_grid = {static_cast<int>(state.range(0))};
    plan.v_grid = {0.0, 0.5, 1.0};
    plan.replicates = 100;
    plan.master_seed = 42;
    plan.target = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(ulln::sup_l1_curve(plan));
}
BENCHMARK(BM_L1Curve)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
