#include <benchmark/benchmark.h>

#include <random>

#include "hazval/estimators.hpp"
#include "hazval/kernel_constants.hpp"
#include "hazval/selection.hpp"

using namespace hazval;

namespace {

GridSample make_sample(int R) {
    GridSample s = make_grid(0.0, 1.0, R, 10 * R);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uy(0.5, 3.0);
    std::poisson_distribution<int> po(2);
    for (int r = 0; r < R; ++r) {
        s.exposures[r] = uy(rng);
        s.occurrences[r] = po(rng);
    }
    return s;
}

void bm_ll_hazard(benchmark::State& state) {
    const GridSample s = make_sample(static_cast<int>(state.range(0)));
    const Kernel k = Kernel::epanechnikov();
    for (auto _ : state) benchmark::DoNotOptimize(ll_hazard(s, 0.1, k));
}

void bm_mbc_hazard(benchmark::State& state) {
    const GridSample s = make_sample(static_cast<int>(state.range(0)));
    const Kernel k = Kernel::epanechnikov();
    for (auto _ : state) benchmark::DoNotOptimize(mbc_hazard(s, 0.1, k));
}

void bm_cv_score(benchmark::State& state) {
    const GridSample s = make_sample(static_cast<int>(state.range(0)));
    const Kernel k = Kernel::epanechnikov();
    const WeightScheme w = WeightScheme::unit_product();
    for (auto _ : state)
        benchmark::DoNotOptimize(cv_score(s, 0.1, EstimatorKind::LL, k, w));
}

void bm_bo_cv_score(benchmark::State& state) {
    const GridSample s = make_sample(static_cast<int>(state.range(0)));
    const Kernel k = Kernel::epanechnikov();
    const WeightScheme w = WeightScheme::unit_product();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            bo_cv_score(s, 0.1, EstimatorKind::LL, k, w, SideMode::occurrence));
}

void bm_psi_factor(benchmark::State& state) {
    const Kernel k = Kernel::quartic();
    for (auto _ : state)
        benchmark::DoNotOptimize(psi_factor(PsiMethod::BO, EstimatorFamily::MBC, k));
}

}  // namespace

BENCHMARK(bm_ll_hazard)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK(bm_mbc_hazard)->Arg(100)->Arg(500);
BENCHMARK(bm_cv_score)->Arg(100)->Arg(500);
BENCHMARK(bm_bo_cv_score)->Arg(100)->Arg(500);
BENCHMARK(bm_psi_factor);

BENCHMARK_MAIN();
