#include "matwalk/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "matwalk/complex.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/walks.hpp"

namespace matwalk {

std::int64_t mixing_bound(int d, LogWeight log_mu_tau, double epsilon) {
    if (d < 1) throw input_error("mixing_bound: d must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw input_error("mixing_bound: epsilon must lie in (0, 1)");
    if (is_log_zero(log_mu_tau)) throw input_error("mixing_bound: start state has zero probability");
    if (log_mu_tau > 0.0) throw input_error("mixing_bound: log mu(tau) must be nonpositive");
    double t = static_cast<double>(d) * (-std::log(epsilon) - log_mu_tau);
    if (t <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(t - 1e-9));
}

std::int64_t mixing_bound_surrogate(int r, int n, double epsilon) {
    if (r < 1 || n < 1) throw input_error("mixing_bound_surrogate: r and n must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw input_error("mixing_bound_surrogate: epsilon must lie in (0, 1)");
    // mu(tau) >= n^-r for uniform bases, so d log(1/(eps mu)) <= r log(n^r / eps)
    double t = static_cast<double>(r) * (static_cast<double>(r) * std::log(static_cast<double>(n)) - std::log(epsilon));
    if (t <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(t - 1e-9));
}

std::int64_t auto_steps(const HomogeneousDistribution& mu, Subset start, double epsilon) {
    int d = mu.degree();
    if (d == 0) return 0;
    std::int64_t t = mixing_bound(d, -mu.surrogate_neg_log_mu(start), epsilon);
    // a single drop lands exactly on stationarity when d = 1
    if (d == 1) t = std::min<std::int64_t>(t, 1);
    return t;
}

const DownUpSampler::CandidateTable& DownUpSampler::table_for(Subset dropped) {
    auto it = cache_.find(dropped.mask());
    if (it != cache_.end()) return it->second;
    if (cache_.size() > (1u << 20)) cache_.clear();

    auto cands = mu_.extension_candidates(dropped);
    if (cands.empty())
        throw state_error("down-up step: face " + dropped.str() + " has no extensions in the support");
    double shift = log_zero();
    for (const auto& [e, lw] : cands) shift = std::max(shift, lw);
    CandidateTable table;
    table.elems.reserve(cands.size());
    table.cumulative.reserve(cands.size());
    double running = 0.0;
    for (const auto& [e, lw] : cands) {
        running += std::exp(lw - shift);
        table.elems.push_back(e);
        table.cumulative.push_back(running);
    }
    return cache_.emplace(dropped.mask(), std::move(table)).first->second;
}

void DownUpSampler::step(ChainState& state, StreamRng& rng) {
    int d = mu_.degree();
    if (d < 1) throw state_error("down-up step: distribution degree is zero");
    if (static_cast<int>(state.current.size()) != d)
        throw state_error("down-up step: state " + state.current.str() + " does not have size " +
                          std::to_string(d));
    int drop = state.current.nth(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d))));
    const CandidateTable& table = table_for(state.current.without(drop));
    double total = table.cumulative.back();
    double u = rng.next_double() * total;
    std::size_t pick = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u) -
                       table.cumulative.begin();
    if (pick >= table.elems.size()) pick = table.elems.size() - 1;
    state.current = state.current.without(drop).with(table.elems[pick]);
    ++state.step_count;
}

Subset DownUpSampler::run_chain(std::uint64_t seed, std::uint64_t stream, Subset start, std::int64_t steps) {
    StreamRng rng(seed, stream, 0);
    ChainState state{start, 0};
    for (std::int64_t t = 0; t < steps; ++t) step(state, rng);
    return state.current;
}

std::vector<Subset> sample(const HomogeneousDistribution& mu, std::int64_t count, const SamplerConfig& cfg,
                           int workers, std::int64_t* steps_used) {
    if (count < 0) throw input_error("sample: count must be nonnegative");
    if (cfg.thinning < 0) throw input_error("sample: thinning interval must be nonnegative");
    if (workers < 1) throw input_error("sample: workers must be at least 1");
    if (cfg.steps < 0 && !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw input_error("sample: epsilon must lie in (0, 1)");

    std::vector<Subset> out(static_cast<std::size_t>(count), Subset{});
    if (mu.degree() == 0) {
        if (steps_used) *steps_used = 0;
        return out;
    }
    Subset start = mu.canonical_start();
    std::int64_t steps = cfg.steps >= 0 ? cfg.steps : auto_steps(mu, start, cfg.epsilon);
    if (steps_used) *steps_used = steps;
    if (count == 0) return out;

    if (cfg.thinning > 0) {
        // one long chain, emitting every cfg.thinning transitions after burn-in
        DownUpSampler sampler(mu.clone_for_worker());
        StreamRng rng(cfg.seed, 0, 0);
        ChainState state{start, 0};
        for (std::int64_t t = 0; t < steps; ++t) sampler.step(state, rng);
        out[0] = state.current;
        for (std::int64_t i = 1; i < count; ++i) {
            for (std::int64_t t = 0; t < cfg.thinning; ++t) sampler.step(state, rng);
            out[static_cast<std::size_t>(i)] = state.current;
        }
        std::uint64_t calls = sampler.distribution().oracle_calls();
        if (calls > 0) mu.matroid().add_calls(calls);
        return out;
    }

    // fresh chain per sample; sample i is a pure function of (cfg.seed, i),
    // so the partition into workers cannot change the output
    int used = static_cast<int>(std::min<std::int64_t>(workers, count));
    std::int64_t chunk = (count + used - 1) / used;
    std::vector<std::uint64_t> calls(static_cast<std::size_t>(used), 0);
    auto run_range = [&](int w) {
        std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
        std::int64_t hi = std::min<std::int64_t>(count, lo + chunk);
        DownUpSampler sampler(mu.clone_for_worker());
        for (std::int64_t i = lo; i < hi; ++i)
            out[static_cast<std::size_t>(i)] =
                sampler.run_chain(cfg.seed, static_cast<std::uint64_t>(i), start, steps);
        calls[static_cast<std::size_t>(w)] = sampler.distribution().oracle_calls();
    };
    if (used == 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(used));
        for (int w = 0; w < used; ++w) pool.emplace_back(run_range, w);
        for (auto& th : pool) th.join();
    }
    std::uint64_t total_calls = 0;
    for (std::uint64_t c : calls) total_calls += c;
    if (total_calls > 0) mu.matroid().add_calls(total_calls);
    return out;
}

std::vector<std::pair<int, double>> exact_tv_curve(const HomogeneousDistribution& mu, Subset start,
                                                   int t_max, std::size_t cap) {
    if (t_max < 0) throw input_error("exact_tv_curve: t_max must be nonnegative");
    if (mu.degree() == 0) {
        if (!start.empty()) throw input_error("exact_tv_curve: start state must be empty for degree zero");
        return std::vector<std::pair<int, double>>(static_cast<std::size_t>(t_max) + 1, {0, 0.0});
    }
    WeightedComplex x = build_complex(materialize(mu, cap));
    WalkMatrix chain = lower_walk(x, x.d);
    std::size_t m = chain.faces.size();
    std::size_t s0 = m;
    for (std::size_t i = 0; i < m; ++i)
        if (chain.faces[i] == start) s0 = i;
    if (s0 == m) throw input_error("exact_tv_curve: start " + start.str() + " is outside the support");

    Eigen::VectorXd pi(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) pi(static_cast<Eigen::Index>(i)) = chain.w[i];
    pi /= pi.sum();

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(m));
    row(static_cast<Eigen::Index>(s0)) = 1.0;
    std::vector<std::pair<int, double>> curve;
    curve.reserve(static_cast<std::size_t>(t_max) + 1);
    for (int t = 0; t <= t_max; ++t) {
        curve.emplace_back(t, (row.transpose() - pi).cwiseAbs().sum());
        if (t < t_max) row = row * chain.p;
    }
    return curve;
}

}  // namespace matwalk
