#include <benchmark/benchmark.h>

#include "transflow/flow.hpp"
#include "transflow/pathology.hpp"
#include "transflow/registry.hpp"
#include "transflow/sudakov.hpp"

namespace {

using transflow::Measure1D;

void BM_MonotoneMap(benchmark::State& state) {
    const auto t = transflow::compute_monotone_map(Measure1D::gaussian(0.0, 1.0), Measure1D::gaussian(1.0, 2.0));
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(t(x));
        x = x > 3.0 ? -3.0 : x + 1e-3;
    }
}
BENCHMARK(BM_MonotoneMap);

void BM_BuildField(benchmark::State& state) {
    const transflow::Example ex = transflow::make_example("bad-fixed-point");
    for (auto _ : state) benchmark::DoNotOptimize(transflow::build_field(ex.map, ex.seed, ex.options));
}
BENCHMARK(BM_BuildField)->Unit(benchmark::kMillisecond);

void BM_FlowEval(benchmark::State& state) {
    const transflow::Example ex = transflow::make_example("gaussian");
    const transflow::FlowMap phi(transflow::build_field(ex.map, ex.seed, ex.options));
    double x = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi(0.5, x));
        x = x > 2.0 ? -2.0 : x + 1e-3;
    }
}
BENCHMARK(BM_FlowEval);

void BM_Verify(benchmark::State& state) {
    const transflow::Example ex = transflow::make_example("affine");
    const auto v = transflow::build_field(ex.map, ex.seed, ex.options);
    transflow::VerifyOptions o;
    o.n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(transflow::verify_transport(v, ex.m0, ex.m1, o));
}
BENCHMARK(BM_Verify)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_PathologyGrowth(benchmark::State& state) {
    const auto c = transflow::build_counterexample(transflow::CounterexampleVariant::quadratic);
    for (auto _ : state) benchmark::DoNotOptimize(transflow::probe_velocity_growth(c, state.range(0)));
}
BENCHMARK(BM_PathologyGrowth)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Sudakov(benchmark::State& state) {
    const auto fam = transflow::decompose(transflow::MeasureND::ball({0.0, 0.0}, 1.0),
                                          transflow::MeasureND::ball({0.0, 0.0}, 2.0));
    const auto v = transflow::assemble_field(fam);
    transflow::NdVerifyOptions o;
    o.samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(transflow::verify_nd(v, o));
}
BENCHMARK(BM_Sudakov)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
