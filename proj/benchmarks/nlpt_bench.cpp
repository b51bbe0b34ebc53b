#include "nlpt/elliptic_map.hpp"
#include "nlpt/fieldlab.hpp"
#include "nlpt/fixtures.hpp"
#include "nlpt/slag.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nlpt;

namespace {

std::vector<SymMat> matrices(std::size_t n, std::size_t count)
{
    SampleBox box;
    box.seed = 9;
    JetSampler s(box, n);
    std::vector<SymMat> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(s.matrix());
    return out;
}

void BM_EigSym(benchmark::State& state)
{
    const auto ms = matrices(static_cast<std::size_t>(state.range(0)), 256);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(eig_sym(ms[i++ & 255]));
}
BENCHMARK(BM_EigSym)->Arg(2)->Arg(3)->Arg(5)->Arg(8);

void BM_GEval(benchmark::State& state)
{
    const auto ms = matrices(static_cast<std::size_t>(state.range(0)), 256);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(G_eval(ms[i++ & 255]));
}
BENCHMARK(BM_GEval)->Arg(2)->Arg(3)->Arg(5);

void BM_SlagTranslationContinuity(benchmark::State& state)
{
    const auto params = fixture_params("slag_positive");
    const auto m = slag_map(params.fields.at("h"), 2);
    SampleBudget budget;
    budget.pairs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(check_translation_continuity(m, {0.5}, params.domain, SampleBox{}, budget));
}
BENCHMARK(BM_SlagTranslationContinuity)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SupConvolution(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const Grid g(BoxDomain::cube(2, -1.0, 1.0), {n, n});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = unit(rng);
    const GridFunction u(g, v);
    for (auto _ : state) benchmark::DoNotOptimize(sup_convolution(u, 0.05));
}
BENCHMARK(BM_SupConvolution)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
