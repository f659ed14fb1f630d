#include <benchmark/benchmark.h>

#include "bosegas/fock.hpp"
#include "bosegas/hs.hpp"
#include "bosegas/limits.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/mayer.hpp"

using namespace bosegas;

namespace {

ModelParams params(double lambda0) {
    ModelParams p;
    p.lambda0 = lambda0;
    p.rho_value = 0.0;
    return p;
}

}  // namespace

// sites x slices
static void BM_Monodromy(benchmark::State& state) {
    auto g = TorusGeometry::lattice(1, static_cast<int>(state.range(0)));
    TimeGrid grid(1.0, static_cast<int>(state.range(1)));
    auto v = TwoBodyPotential::delta(g);
    auto p = params(0.5);
    Monodromy mono(g, grid);
    auto sigma = sample_sigma(p, g, grid, v, 1);
    for (auto _ : state) benchmark::DoNotOptimize(mono.full(sigma));
}
BENCHMARK(BM_Monodromy)->Args({2, 16})->Args({8, 32})->Args({16, 64});

static void BM_HSWeight(benchmark::State& state) {
    auto g = TorusGeometry::lattice(1, static_cast<int>(state.range(0)));
    TimeGrid grid(1.0, 32);
    auto v = TwoBodyPotential::delta(g);
    HSModel m(params(0.5), g, grid, v);
    Rng rng(2);
    for (auto _ : state) {
        auto w = m.weight(m.sample(rng));
        benchmark::DoNotOptimize(w.exponent);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HSWeight)->Arg(2)->Arg(8)->Arg(16);

static void BM_LoopGasSeries(benchmark::State& state) {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 32);
    auto v = TwoBodyPotential::delta(g);
    LoopTruncation t;
    t.n_max = static_cast<int>(state.range(0));
    t.l_max = 6;
    std::uint64_t seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(xi_rel_series(params(0.5), g, grid, v, t, 256, seed++).xi_rel.value);
}
BENCHMARK(BM_LoopGasSeries)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_MayerSeries(benchmark::State& state) {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 16);
    auto v = TwoBodyPotential::delta(g);
    std::uint64_t seed = 4;
    for (auto _ : state) benchmark::DoNotOptimize(mayer_series(params(0.1), g, grid, v, 3, 6, 256, seed++).log_xi_rel);
}
BENCHMARK(BM_MayerSeries)->Unit(benchmark::kMillisecond);

// sites x occupation cut
static void BM_FockOracle(benchmark::State& state) {
    auto g = TorusGeometry::lattice(1, static_cast<int>(state.range(0)));
    auto v = TwoBodyPotential::delta(g);
    for (auto _ : state) benchmark::DoNotOptimize(xi_exact(params(0.5), g, v, static_cast<int>(state.range(1))).xi);
}
BENCHMARK(BM_FockOracle)->Args({1, 10})->Args({2, 8})->Args({3, 6})->Unit(benchmark::kMillisecond);

static void BM_ClassicalXi(benchmark::State& state) {
    auto circle = TorusGeometry::circle(4.0);
    auto v = TwoBodyPotential::gaussian(circle, 1.0, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(classical_xi(0.5, 1.0, 1.0, circle, v, static_cast<int>(state.range(0))).value);
}
BENCHMARK(BM_ClassicalXi)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
