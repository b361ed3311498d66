#include "chowla/arith.hpp"
#include "chowla/family.hpp"
#include "chowla/lfun.hpp"
#include "chowla/model.hpp"

#include <benchmark/benchmark.h>

using namespace chowla;

static void BM_Kronecker(benchmark::State& state)
{
    const std::int64_t d = 4'000'000'001;
    std::uint64_t n = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kronecker(d, n));
        n = n * 6364136223846793005ULL + 1442695040888963407ULL;
        n >>= 20;
    }
}
BENCHMARK(BM_Kronecker);

static void BM_CharacterTable(benchmark::State& state)
{
    const auto size = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(character_table(1'000'001, size));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CharacterTable)->Arg(1 << 16)->Arg(1 << 20);

// Reduced-form cycle count for d = 4m^2+1 of growing size.
static void BM_FormCycles(benchmark::State& state)
{
    const u64 m = static_cast<u64>(state.range(0));
    const u64 d = 4 * m * m + 1;
    for (auto _ : state) benchmark::DoNotOptimize(count_form_cycles(d));
}
BENCHMARK(BM_FormCycles)->Arg(500)->Arg(5002)->Arg(20002)->Unit(benchmark::kMillisecond);

static void BM_LValueRigorous(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(l_value_rigorous(1'000'001, 1e-4));
}
BENCHMARK(BM_LValueRigorous)->Unit(benchmark::kMillisecond);

static void BM_LValueFast(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(l_value_fast(1'000'001, 1e4));
}
BENCHMARK(BM_LValueFast)->Unit(benchmark::kMicrosecond);

static void BM_EvaluateFamily(benchmark::State& state)
{
    const auto members = enumerate(1e7);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_family(members, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(members.size()));
}
BENCHMARK(BM_EvaluateFamily)->Unit(benchmark::kMillisecond);

static void BM_ScriptL(benchmark::State& state)
{
    static const RandomModel model;
    for (auto _ : state) benchmark::DoNotOptimize(model.script_L({1.0, 1.0}));
}
BENCHMARK(BM_ScriptL)->Unit(benchmark::kMillisecond);

static void BM_Saddle(benchmark::State& state)
{
    static const RandomModel model;
    for (auto _ : state) benchmark::DoNotOptimize(solve_saddle(model, 5.0));
}
BENCHMARK(BM_Saddle)->Unit(benchmark::kMillisecond);

static void BM_SamplerDraw(benchmark::State& state)
{
    const EulerProductSampler sampler(1);
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(i++));
}
BENCHMARK(BM_SamplerDraw);

BENCHMARK_MAIN();
