#include "doctest.h"

#include <cmath>
#include <map>

#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/sampler.hpp"

using namespace matwalk;

namespace {

Subset sub(std::initializer_list<int> e) { return Subset::from_indices(std::vector<int>(e)); }

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("mixing bound values") {
    CHECK(mixing_bound(2, std::log(1.0 / 6.0), 0.1) == 9);
    CHECK(mixing_bound(1, std::log(0.5), 0.5) == 2);
    CHECK(mixing_bound(3, 0.0, 0.5) == 3);  // start mass 1 still pays the log(1/eps) term
    CHECK(mixing_bound(2, std::log(1.0 / 6.0), 0.99999999) > 0);
    CHECK_THROWS_AS(mixing_bound(0, -1.0, 0.1), input_error);
    CHECK_THROWS_AS(mixing_bound(2, 0.5, 0.1), input_error);
    CHECK_THROWS_AS(mixing_bound(2, -1.0, 0.0), input_error);
    CHECK_THROWS_AS(mixing_bound(2, -1.0, 1.0), input_error);
}

TEST_CASE("surrogate bound values") {
    CHECK(mixing_bound_surrogate(2, 4, 0.1) == 11);
    CHECK(mixing_bound_surrogate(1, 2, 0.5) == 2);
}

TEST_CASE("auto steps uses the counting surrogate") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    std::int64_t t = auto_steps(mu, mu.canonical_start(), 0.1);
    CHECK(t == mixing_bound(2, -std::log(6.0), 0.1));
}

TEST_CASE("chain stays inside the support") {
    auto mu = HomogeneousDistribution::make_cluster_layer(k4(), 2, 0.5);
    DownUpSampler sampler(mu);
    ChainState state{mu.canonical_start(), 0};
    StreamRng rng(99, 0, 0);
    for (int t = 0; t < 200; ++t) {
        sampler.step(state, rng);
        CHECK(state.current.size() == 2);
        CHECK_FALSE(is_log_zero(mu.log_weight(state.current)));
    }
    CHECK(state.step_count == 200);
}

TEST_CASE("run_chain is deterministic") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    DownUpSampler sampler(mu);
    Subset a = sampler.run_chain(7, 3, mu.canonical_start(), 50);
    Subset b = sampler.run_chain(7, 3, mu.canonical_start(), 50);
    Subset c = sampler.run_chain(7, 4, mu.canonical_start(), 50);
    CHECK(a == b);
    CHECK((a != c || sampler.run_chain(8, 3, mu.canonical_start(), 50) != a));
}

TEST_CASE("one-step transition frequencies match the kernel") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    SamplerConfig cfg{2024, 0.1, 1, 0};
    const std::int64_t n = 20000;
    auto draws = sample(mu, n, cfg);
    REQUIRE(draws.size() == static_cast<size_t>(n));
    std::map<std::uint64_t, int> freq;
    for (Subset s : draws) ++freq[s.mask()];
    // from {0,1}: stay w.p. 1/3, move to an overlapping pair w.p. 1/6 each
    Subset start = mu.canonical_start();
    REQUIRE(start == sub({0, 1}));
    auto frac = [&](Subset s) { return static_cast<double>(freq[s.mask()]) / static_cast<double>(n); };
    double sigma3 = 3.0 * std::sqrt(0.33 * 0.67 / static_cast<double>(n));
    CHECK(std::abs(frac(sub({0, 1})) - 1.0 / 3.0) < sigma3);
    CHECK(std::abs(frac(sub({0, 2})) - 1.0 / 6.0) < sigma3);
    CHECK(std::abs(frac(sub({1, 3})) - 1.0 / 6.0) < sigma3);
    CHECK(freq[sub({2, 3}).mask()] == 0);
}

TEST_CASE("long-run frequencies approach stationarity") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    SamplerConfig cfg{5, 0.01, -1, 0};
    const std::int64_t n = 12000;
    auto draws = sample(mu, n, cfg);
    std::map<std::uint64_t, int> freq;
    for (Subset s : draws) ++freq[s.mask()];
    CHECK(freq.size() == 6);
    for (const auto& [mask, count] : freq)
        CHECK(std::abs(static_cast<double>(count) / n - 1.0 / 6.0) < 0.02);
}

TEST_CASE("sampling is deterministic and worker-count independent") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    SamplerConfig cfg{31, 0.05, -1, 0};
    auto a = sample(mu, 64, cfg, 1);
    auto b = sample(mu, 64, cfg, 1);
    auto c = sample(mu, 64, cfg, 3);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("steps_used reports the bound actually applied") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    std::int64_t used = -1;
    SamplerConfig cfg{1, 0.1, -1, 0};
    sample(mu, 1, cfg, 1, &used);
    CHECK(used == auto_steps(mu, mu.canonical_start(), 0.1));
    SamplerConfig fixed{1, 0.1, 17, 0};
    sample(mu, 1, fixed, 1, &used);
    CHECK(used == 17);
}

TEST_CASE("zero steps returns the start state") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    SamplerConfig cfg{9, 0.1, 0, 0};
    auto draws = sample(mu, 5, cfg);
    for (Subset s : draws) CHECK(s == mu.canonical_start());
}

TEST_CASE("thinning emits a strided single chain") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    SamplerConfig cfg{12, 0.1, -1, 4};
    auto a = sample(mu, 10, cfg);
    auto b = sample(mu, 10, cfg);
    REQUIRE(a.size() == 10);
    CHECK(a == b);
    for (Subset s : a) CHECK_FALSE(is_log_zero(mu.log_weight(s)));
}

TEST_CASE("exact tv curve decays under the bound") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    Subset start = mu.canonical_start();
    std::int64_t t01 = mixing_bound(2, std::log(1.0 / 6.0), 0.1);
    auto curve = exact_tv_curve(mu, start, static_cast<int>(t01), 5000);
    REQUIRE(curve.size() == static_cast<size_t>(t01) + 1);
    CHECK(curve.front().second > 1.0);  // ell-1 distance starts near 2
    CHECK(curve.back().second <= 0.1);
    for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second <= curve[i - 1].second + 1e-12);
}

TEST_CASE("sampler input validation") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    SamplerConfig cfg{1, 0.1, -1, 0};
    CHECK_THROWS_AS(sample(mu, -1, cfg), input_error);
    CHECK_THROWS_AS(sample(mu, 1, SamplerConfig{1, 0.0, -1, 0}), input_error);
    CHECK_THROWS_AS(sample(mu, 1, SamplerConfig{1, 1.0, -1, 0}), input_error);
    CHECK_THROWS_AS(sample(mu, 1, cfg, 0), input_error);
    CHECK_THROWS_AS(sample(mu, 1, SamplerConfig{1, 0.1, -1, -2}), input_error);
}
