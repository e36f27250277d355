#include <benchmark/benchmark.h>

#include "matwalk/complex.hpp"
#include "matwalk/counting.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/walks.hpp"

using namespace matwalk;

namespace {

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

void bm_build_complex_k4(benchmark::State& state) {
    auto poly = materialize(HomogeneousDistribution::make_uniform_bases(k4()), 1u << 20);
    for (auto _ : state) {
        WeightedComplex x = build_complex(poly);
        benchmark::DoNotOptimize(x);
    }
}

void bm_chain_spectrum_k4(benchmark::State& state) {
    WeightedComplex x = build_complex(materialize(HomogeneousDistribution::make_uniform_bases(k4()), 1u << 20));
    for (auto _ : state) {
        WalkMatrix w = lower_walk(x, x.d);
        Spectrum s = spectrum(w);
        benchmark::DoNotOptimize(s);
    }
}

void bm_count_bases_k4(benchmark::State& state) {
    Matroid m = k4();
    for (auto _ : state) {
        EstimateReport rep = count_bases(m, 0.5, 0.2, 7);
        benchmark::DoNotOptimize(rep.estimate);
    }
}

}  // namespace

BENCHMARK(bm_build_complex_k4);
BENCHMARK(bm_chain_spectrum_k4);
BENCHMARK(bm_count_bases_k4)->Unit(benchmark::kMillisecond);
