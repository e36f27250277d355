#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "matwalk/distribution.hpp"
#include "matwalk/rng.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

struct ChainState {
    Subset current;
    std::uint64_t step_count = 0;
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    double epsilon = 0.01;     // total variation target used when steps < 0
    std::int64_t steps = -1;   // explicit step count; negative selects the mixing bound
    std::int64_t thinning = 0; // 0 = fresh chain per sample, else emit interval on one chain
};

// ceil(d (log(1/epsilon) - log mu(tau))), floored at zero
std::int64_t mixing_bound(int d, LogWeight log_mu_tau, double epsilon);

// oracle-only fallback ceil(r log(n^r / epsilon)) for uniform bases
std::int64_t mixing_bound_surrogate(int r, int n, double epsilon);

// mixing bound fed by the distribution's worst-case surrogate for
// -log mu(start); single-element states converge in one step
std::int64_t auto_steps(const HomogeneousDistribution& mu, Subset start, double epsilon);

// down-up walk: drop a uniform element, re-extend proportionally to weight.
// candidate tables are memoized per dropped face, so a handle is cheap to
// step but must stay on one thread; clone the distribution per worker
class DownUpSampler {
public:
    explicit DownUpSampler(HomogeneousDistribution mu) : mu_(std::move(mu)) {}

    const HomogeneousDistribution& distribution() const { return mu_; }

    // one transition; consumes exactly two rng draws
    void step(ChainState& state, StreamRng& rng);

    // fresh chain from start, advanced `steps` times on substream (seed, stream)
    Subset run_chain(std::uint64_t seed, std::uint64_t stream, Subset start, std::int64_t steps);

private:
    struct CandidateTable {
        std::vector<int> elems;
        std::vector<double> cumulative;  // unnormalized running sums
    };
    const CandidateTable& table_for(Subset dropped);

    HomogeneousDistribution mu_;
    std::unordered_map<std::uint64_t, CandidateTable> cache_;
};

// `count` draws whose TV distance from mu is at most cfg.epsilon each;
// deterministic given cfg.seed, independent of the worker count.
// steps_used receives the per-chain step count when non-null
std::vector<Subset> sample(const HomogeneousDistribution& mu, std::int64_t count, const SamplerConfig& cfg,
                           int workers = 1, std::int64_t* steps_used = nullptr);

// exact ell-1 distance between the t-step distribution from start and
// stationarity, for t = 0..t_max, on the materialized chain
std::vector<std::pair<int, double>> exact_tv_curve(const HomogeneousDistribution& mu, Subset start,
                                                   int t_max, std::size_t cap);

}  // namespace matwalk
