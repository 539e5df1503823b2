#include <wavesim/arma.hpp>
#include <wavesim/copula.hpp>
#include <wavesim/pipeline.hpp>
#include <wavesim/rng.hpp>
#include <wavesim/stats.hpp>

#include "truth_model.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace wavesim;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) {
        x = rng.normal();
    }
    return out;
}

struct Pseudo {
    std::vector<double> u;
    std::vector<double> v;
};

Pseudo pseudo_sample(const copula::CopulaSpec& c, std::size_t n) {
    Rng rng(5);
    std::vector<double> u;
    std::vector<double> v;
    for (const auto& p : copula::copula_sample(c, n, rng)) {
        u.push_back(p.u);
        v.push_back(p.v);
    }
    return {stats::pseudo_observations(u), stats::pseudo_observations(v)};
}

void BM_KendallTau(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = normals(n, 1);
    const auto y = normals(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stats::kendall_tau(x, y));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity(benchmark::oNLogN);

void BM_CopulaFit(benchmark::State& state) {
    using copula::Family;
    const auto family = static_cast<Family>(state.range(0));
    const copula::CopulaSpec truth = family == Family::student_t ? copula::CopulaSpec{family, 0, -0.23, 6.36}
                                     : family == Family::bb8     ? copula::CopulaSpec{family, 0, 1.86, 0.68}
                                                                 : copula::CopulaSpec{family, 0, 1.77, 0.0};
    const auto s = pseudo_sample(truth, 5000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(copula::fit_copula(s.u, s.v, family).aic);
    }
    state.SetLabel(std::string(copula::family_name(family)));
}
BENCHMARK(BM_CopulaFit)
    ->Arg(static_cast<int>(copula::Family::frank))
    ->Arg(static_cast<int>(copula::Family::student_t))
    ->Arg(static_cast<int>(copula::Family::bb8))
    ->Unit(benchmark::kMillisecond);

void BM_CopulaSelect(benchmark::State& state) {
    const auto s = pseudo_sample({copula::Family::student_t, 0, -0.23, 6.36}, 5000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(copula::select_copula(s.u, s.v, copula::kAllFamilies).best.aic);
    }
}
BENCHMARK(BM_CopulaSelect)->Unit(benchmark::kMillisecond);

void BM_ArmaLogLikelihood(benchmark::State& state) {
    const auto truth = testing::tm02_arma_truth();
    Rng rng(3);
    std::vector<double> e(static_cast<std::size_t>(state.range(0)) + 1000);
    for (double& x : e) {
        x = std::sqrt(truth.sigma2) * rng.normal();
    }
    const auto z = arma::simulate_arma(truth, e, 1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(arma::log_likelihood(truth, z));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ArmaLogLikelihood)->Arg(8766)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimulateYears(benchmark::State& state) {
    static const auto model = testing::truth_model();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline::simulate(model, static_cast<std::size_t>(state.range(0)), ++seed));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * kHoursPerYear);
}
BENCHMARK(BM_SimulateYears)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
