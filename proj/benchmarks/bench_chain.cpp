#include <benchmark/benchmark.h>

#include "matwalk/distribution.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/rng.hpp"
#include "matwalk/sampler.hpp"

using namespace matwalk;

namespace {

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

Matroid fano() {
    return linear_matroid_gfp(2, {{1, 0, 0, 1, 1, 0, 1}, {0, 1, 0, 1, 0, 1, 1}, {0, 0, 1, 0, 1, 1, 1}});
}

void run_steps(benchmark::State& state, HomogeneousDistribution mu) {
    DownUpSampler sampler(std::move(mu));
    ChainState chain{sampler.distribution().canonical_start(), 0};
    StreamRng rng(12345, 0, 0);
    for (auto _ : state) {
        sampler.step(chain, rng);
        benchmark::DoNotOptimize(chain.current);
    }
    state.SetItemsProcessed(state.iterations());
}

void bm_step_uniform_u48(benchmark::State& state) {
    run_steps(state, HomogeneousDistribution::make_uniform_bases(uniform_matroid(8, 4)));
}

void bm_step_uniform_k4(benchmark::State& state) {
    run_steps(state, HomogeneousDistribution::make_uniform_bases(k4()));
}

void bm_step_uniform_fano(benchmark::State& state) {
    run_steps(state, HomogeneousDistribution::make_uniform_bases(fano()));
}

void bm_step_cluster_k4(benchmark::State& state) {
    run_steps(state, HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.5));
}

void bm_sample_k4(benchmark::State& state) {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    SamplerConfig cfg{7, 0.1, -1, 0};
    auto count = state.range(0);
    for (auto _ : state) {
        auto draws = sample(mu, count, cfg);
        benchmark::DoNotOptimize(draws);
    }
    state.SetItemsProcessed(state.iterations() * count);
}

}  // namespace

BENCHMARK(bm_step_uniform_u48);
BENCHMARK(bm_step_uniform_k4);
BENCHMARK(bm_step_uniform_fano);
BENCHMARK(bm_step_cluster_k4);
BENCHMARK(bm_sample_k4)->Arg(16)->Arg(256);

BENCHMARK_MAIN();
