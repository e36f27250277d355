#include "matwalk/counting.hpp"

#include <algorithm>
#include <cmath>

#include "matwalk/errors.hpp"
#include "matwalk/log_weight.hpp"
#include "matwalk/rng.hpp"
#include "matwalk/sampler.hpp"

namespace matwalk {

namespace {

void check_request(double epsilon, double delta, int workers) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw input_error("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw input_error("delta must lie in (0, 1)");
    if (workers < 1) throw input_error("workers must be at least 1");
}

// Schedule for a telescope of L sampled levels under a (1 + budget) total:
// each level's factor 1/q_hat must stay within (1 + pe) of 1/q for
// pe = (1 + budget)^(1/L) - 1.  The per-level error splits into a
// statistical part gamma = 0.9 pe/(1+pe) (two-sided Chernoff at the
// marginal floor d/(2n), union bound over the n elements) and a chain
// bias part (TV target 0.025 pe/(1+pe) d/n, so any event probability is
// off by at most half of that); the remaining slack absorbs the cross
// term, giving |q_hat/q - 1| <= 0.93 pe/(1+pe) and hence
// |1/q_hat| within (1 +- pe) of 1/q.

double plan_pe(double budget, int levels) {
    return std::expm1(std::log1p(budget) / levels) * (1.0 - 1e-12);
}

double gamma_of(double pe) { return 0.9 * pe / (1.0 + pe); }

double tv_target(double pe, int d, int n) {
    return 0.025 * (pe / (1.0 + pe)) * static_cast<double>(d) / n;
}

std::int64_t samples_for(double gamma, double pld, int d, int n) {
    double m = 6.1 * (static_cast<double>(n) / d) * std::log(2.0 * n / pld) / (gamma * gamma);
    return static_cast<std::int64_t>(std::ceil(m));
}

// distinct rng substream per sampling batch within one report
std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t salt) {
    return rng_detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (salt + 1));
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct Batch {
    std::vector<double> marginals;
    std::int64_t used = 0;
    std::int64_t steps = 0;
};

Batch measure(const HomogeneousDistribution& mu, std::int64_t m, double eps_tv, std::uint64_t seed,
              std::uint64_t& salt, int workers, const MarginalFn& marginals) {
    Batch b;
    int n = mu.ground_size();
    if (marginals) {
        b.marginals = marginals(mu);
        if (static_cast<int>(b.marginals.size()) != n)
            throw input_error("marginal override returned " + std::to_string(b.marginals.size()) +
                              " values for ground size " + std::to_string(n));
        return b;
    }
    SamplerConfig cfg;
    cfg.seed = batch_seed(seed, salt++);
    cfg.epsilon = eps_tv;
    cfg.steps = -1;
    std::vector<Subset> draws = sample(mu, m, cfg, workers, &b.steps);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    for (const Subset& s : draws)
        for (int e : s.indices()) ++counts[static_cast<std::size_t>(e)];
    b.marginals.resize(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e)
        b.marginals[static_cast<std::size_t>(e)] =
            static_cast<double>(counts[static_cast<std::size_t>(e)]) / static_cast<double>(m);
    b.used = m;
    return b;
}

// ties go to the lowest index so reruns are reproducible
int argmax_marginal(const std::vector<double>& q) {
    int best = 0;
    for (int e = 1; e < static_cast<int>(q.size()); ++e)
        if (q[static_cast<std::size_t>(e)] > q[static_cast<std::size_t>(best)]) best = e;
    return best;
}

struct Piece {
    double log_value = 0.0;
    std::vector<LevelRecord> records;
    std::int64_t samples = 0;
    std::uint64_t calls = 0;
    AccuracySchedule schedule;
};

AccuracySchedule plan_schedule(double budget, double pld, int levels, int d0, int n0) {
    AccuracySchedule s;
    s.levels = levels;
    if (levels <= 0) return s;
    s.per_level_eps = plan_pe(budget, levels);
    s.per_level_delta = pld;
    double gamma = gamma_of(s.per_level_eps);
    std::int64_t m = 0;
    for (int j = 0; j < levels; ++j) m = std::max(m, samples_for(gamma, pld, d0 - j, n0 - j));
    s.samples_per_level = m;
    return s;
}

// basis count by contraction: N(M) = N(M/e) / Pr[e in B], pivoting on the
// element with the largest estimated marginal
Piece telescope_bases(const Matroid& input, double budget, double pld, std::uint64_t seed,
                      std::uint64_t& salt, int workers, const MarginalFn& marginals) {
    Piece out;
    Matroid cur = input.with_fresh_counter();
    out.schedule = plan_schedule(budget, pld, std::max(0, cur.rank() - 1), cur.rank(), cur.size());
    while (true) {
        int d = cur.rank();
        int n = cur.size();
        if (d == 0) {
            out.records.push_back({"rank 0, single empty basis", -1, 0.0, 0.0, 0, 0, true});
            break;
        }
        if (d == 1) {
            int nl = n - static_cast<int>(cur.loops().size());
            double lf = std::log(static_cast<double>(nl));
            out.records.push_back({"rank 1, bases are the non-loops", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        if (d == n) {
            out.records.push_back({"free matroid, single basis", -1, 0.0, 0.0, 0, 0, true});
            break;
        }
        HomogeneousDistribution mu = HomogeneousDistribution::make_uniform_bases(cur);
        double eps_tv = tv_target(out.schedule.per_level_eps, d, n);
        Batch b = measure(mu, out.schedule.samples_per_level, eps_tv, seed, salt, workers, marginals);
        int e = argmax_marginal(b.marginals);
        double q = b.marginals[static_cast<std::size_t>(e)];
        if (!(q > 0.0)) throw state_error("count_bases: all estimated marginals vanished");
        double lf = -std::log(q);
        out.log_value += lf;
        out.samples += b.used;
        out.records.push_back({"contract pivot", cur.labels()[static_cast<std::size_t>(e)], q, lf,
                               b.used, b.steps, false});
        Matroid next = cur.contract(Subset{}.with(e));
        out.calls += cur.oracle_calls();
        cur = next;
    }
    out.calls += cur.oracle_calls();
    return out;
}

// one random-cluster layer f_k: pivoting on a non-loop contracts and pays
// 1/q, pivoting on a loop deletes with no extra factor
Piece telescope_cluster(const Matroid& input, int k, double q, double budget, double pld,
                        std::uint64_t seed, std::uint64_t& salt, int workers, const MarginalFn& marginals) {
    Piece out;
    Matroid cur = input.with_fresh_counter();
    int planned = (k >= 2 && k < cur.size()) ? k - 1 : 0;
    out.schedule = plan_schedule(budget, pld, planned, k, cur.size());
    double lq = std::log(q);
    int kc = k;
    while (true) {
        int n = cur.size();
        if (kc == 0) {
            out.records.push_back({"k = 0, single empty set", -1, 0.0, 0.0, 0, 0, true});
            break;
        }
        if (kc == 1) {
            int loops = static_cast<int>(cur.loops().size());
            double lf = std::log(static_cast<double>(loops) + static_cast<double>(n - loops) / q);
            out.records.push_back({"k = 1, direct sum over singletons", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        if (cur.rank() == 0) {
            double lf = log_binomial(n, kc);
            out.records.push_back({"all loops, every set has unit weight", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        if (kc == n) {
            double lf = -static_cast<double>(cur.rank()) * lq;
            out.records.push_back({"k = n, single full set", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        HomogeneousDistribution mu = HomogeneousDistribution::make_cluster_layer(cur, kc, q);
        double eps_tv = tv_target(out.schedule.per_level_eps, kc, n);
        Batch b = measure(mu, out.schedule.samples_per_level, eps_tv, seed, salt, workers, marginals);
        int e = argmax_marginal(b.marginals);
        double qh = b.marginals[static_cast<std::size_t>(e)];
        if (!(qh > 0.0)) throw state_error("cluster_partition: all estimated marginals vanished");
        bool loop = cur.rank_of(Subset{}.with(e)) == 0;
        double lf = -std::log(qh) + (loop ? 0.0 : -lq);
        out.log_value += lf;
        out.samples += b.used;
        out.records.push_back({loop ? "delete loop pivot" : "contract pivot",
                               cur.labels()[static_cast<std::size_t>(e)], qh, lf, b.used, b.steps, false});
        Matroid next = loop ? cur.remove(Subset{}.with(e)) : cur.contract(Subset{}.with(e));
        out.calls += cur.oracle_calls();
        cur = next;
        --kc;
    }
    out.calls += cur.oracle_calls();
    return out;
}

double dpp_diag_tol(const Eigen::MatrixXd& l) {
    int n = static_cast<int>(l.rows());
    return 1e-10 * std::max(1.0, l.trace() / std::max(1, n));
}

// log det via eigenvalues; log-zero when any eigenvalue is at or below tol
LogWeight full_log_det(const Eigen::MatrixXd& l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (l + l.transpose()));
    double tol = dpp_diag_tol(l);
    LogWeight s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev <= tol) return log_zero();
        s += std::log(ev);
    }
    return s;
}

// Z_k(L) = Z_{k-1}(L') L_ee^alpha / Pr[e in S] with L' the Schur
// complement of the pivot entry
Piece telescope_dpp(Eigen::MatrixXd l, int k, double alpha, double budget, double pld,
                    std::uint64_t seed, std::uint64_t& salt, int workers, const MarginalFn& marginals) {
    Piece out;
    int n0 = static_cast<int>(l.rows());
    std::vector<int> label(static_cast<std::size_t>(n0));
    for (int e = 0; e < n0; ++e) label[static_cast<std::size_t>(e)] = e;
    int planned = (k >= 2 && k < n0) ? k - 1 : 0;
    out.schedule = plan_schedule(budget, pld, planned, k, n0);
    int kc = k;
    while (true) {
        int n = static_cast<int>(l.rows());
        if (kc == 0) {
            out.records.push_back({"k = 0, single empty set", -1, 0.0, 0.0, 0, 0, true});
            break;
        }
        if (kc == 1) {
            double tol = dpp_diag_tol(l);
            std::vector<LogWeight> diag;
            for (int e = 0; e < n; ++e)
                if (l(e, e) > tol) diag.push_back(alpha * std::log(l(e, e)));
            double lf = log_sum_exp(diag);
            out.records.push_back({"k = 1, direct sum over diagonal", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        if (kc == n) {
            LogWeight ld = full_log_det(l);
            double lf = is_log_zero(ld) ? log_zero() : alpha * ld;
            out.records.push_back({"k = n, single full set", -1, 0.0, lf, 0, 0, true});
            out.log_value += lf;
            break;
        }
        HomogeneousDistribution mu = [&] {
            try {
                return HomogeneousDistribution::make_dpp_alpha(l, kc, alpha);
            } catch (const input_error& err) {
                throw numeric_error(std::string("dpp_partition: conditioned kernel left the valid set: ") +
                                    err.what());
            }
        }();
        double eps_tv = tv_target(out.schedule.per_level_eps, kc, n);
        Batch b = measure(mu, out.schedule.samples_per_level, eps_tv, seed, salt, workers, marginals);
        int e = argmax_marginal(b.marginals);
        double qh = b.marginals[static_cast<std::size_t>(e)];
        if (!(qh > 0.0)) throw state_error("dpp_partition: all estimated marginals vanished");
        double lee = l(e, e);
        if (!(lee > 0.0)) throw state_error("dpp_partition: pivot with positive marginal has zero diagonal");
        double lf = -std::log(qh) + alpha * std::log(lee);
        out.log_value += lf;
        out.samples += b.used;
        out.records.push_back({"condition on pivot", label[static_cast<std::size_t>(e)], qh, lf,
                               b.used, b.steps, false});

        Eigen::MatrixXd next(n - 1, n - 1);
        Eigen::VectorXd col(n - 1);
        std::vector<int> keep;
        keep.reserve(static_cast<std::size_t>(n - 1));
        for (int i = 0; i < n; ++i)
            if (i != e) keep.push_back(i);
        for (int i = 0; i < n - 1; ++i) col(i) = l(keep[static_cast<std::size_t>(i)], e);
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j)
                next(i, j) = l(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
        next -= col * col.transpose() / lee;
        next = 0.5 * (next + next.transpose()).eval();
        l = std::move(next);
        std::vector<int> nl;
        nl.reserve(keep.size());
        for (int i : keep) nl.push_back(label[static_cast<std::size_t>(i)]);
        label = std::move(nl);
        --kc;
    }
    return out;
}

EstimateReport base_report(double epsilon, double delta, std::uint64_t seed) {
    EstimateReport rep;
    rep.epsilon = epsilon;
    rep.delta = delta;
    rep.seed = seed;
    return rep;
}

void finalize(EstimateReport& rep, double log_value) {
    rep.log_estimate = log_value;
    rep.estimate = std::exp(log_value);
}

// positive-sum plumbing shared by reliability and cluster_partition:
// terms with a crude upper bound at or below (eps/2) lower / T in total are
// dropped; the remaining per-term budget is eps when nothing real was
// dropped and eps/2 otherwise
struct TermPlan {
    std::vector<int> keep;
    double budget = 0.0;
    double pld = 0.0;
    int total_levels = 0;
};

TermPlan plan_terms(const std::vector<int>& candidates, const std::vector<double>& log_upper,
                    double log_lower, double epsilon, double delta,
                    const std::vector<int>& levels_of, std::vector<TermRecord>& records) {
    TermPlan plan;
    double cut = is_log_zero(log_lower) || candidates.empty()
                     ? log_zero()
                     : log_lower + std::log(epsilon / 2.0 / static_cast<double>(candidates.size()));
    bool any_real_drop = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        int k = candidates[i];
        double lu = log_upper[i];
        bool zero = is_log_zero(lu);
        if (zero || lu <= cut) {
            TermRecord tr;
            tr.k = k;
            tr.log_term = log_zero();
            tr.dropped = true;
            tr.crude_upper = std::exp(lu);
            records.push_back(std::move(tr));
            if (!zero) any_real_drop = true;
        } else {
            plan.keep.push_back(k);
            plan.total_levels += levels_of[i];
        }
    }
    plan.budget = any_real_drop ? epsilon / 2.0 : epsilon;
    plan.pld = delta / std::max(1, plan.total_levels);
    return plan;
}

}  // namespace

double estimate_marginal(const HomogeneousDistribution& mu, int element, std::int64_t m,
                         const SamplerConfig& cfg, int workers) {
    if (element < 0 || element >= mu.ground_size())
        throw input_error("estimate_marginal: element out of range");
    if (m < 1) throw input_error("estimate_marginal: sample count must be at least 1");
    std::vector<Subset> draws = sample(mu, m, cfg, workers);
    std::int64_t c = 0;
    for (const Subset& s : draws)
        if (s.contains(element)) ++c;
    return static_cast<double>(c) / static_cast<double>(m);
}

std::vector<double> exact_marginals(const HomogeneousDistribution& mu, std::size_t cap) {
    ExplicitPolynomial p = materialize(mu, cap);
    int n = mu.ground_size();
    std::vector<LogWeight> all;
    std::vector<std::vector<LogWeight>> per(static_cast<std::size_t>(n));
    for (const auto& [mask, lc] : p.log_coefs) {
        all.push_back(lc);
        for (int e : Subset(mask).indices()) per[static_cast<std::size_t>(e)].push_back(lc);
    }
    double lz = log_sum_exp(all);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int e = 0; e < n; ++e) {
        double le = log_sum_exp(per[static_cast<std::size_t>(e)]);
        out[static_cast<std::size_t>(e)] = is_log_zero(le) ? 0.0 : std::exp(le - lz);
    }
    return out;
}

EstimateReport count_bases(const Matroid& m, double epsilon, double delta, std::uint64_t seed,
                           int workers, const MarginalFn& marginals) {
    check_request(epsilon, delta, workers);
    EstimateReport rep = base_report(epsilon, delta, seed);
    std::uint64_t salt = 0;
    int planned = std::max(0, m.rank() - 1);
    double pld = delta / std::max(1, planned);
    Piece p = telescope_bases(m, epsilon, pld, seed, salt, workers, marginals);
    finalize(rep, p.log_value);
    rep.samples_used = p.samples;
    rep.oracle_calls = p.calls;
    rep.schedule = p.schedule;
    rep.levels = std::move(p.records);
    return rep;
}

EstimateReport count_independent_sets(const Matroid& m, int k, double epsilon, double delta,
                                      std::uint64_t seed, int workers, const MarginalFn& marginals) {
    if (k < 0 || k > m.rank())
        throw input_error("count_independent_sets: k must lie in [0, rank], got " + std::to_string(k));
    Matroid t = m.truncate(k).with_fresh_counter();
    EstimateReport rep = count_bases(t, epsilon, delta, seed, workers, marginals);
    rep.oracle_calls += t.oracle_calls();
    return rep;
}

EstimateReport reliability(const Matroid& m, double p, double epsilon, double delta, std::uint64_t seed,
                           int workers, const MarginalFn& marginals) {
    check_request(epsilon, delta, workers);
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("reliability: p must lie in [0, 1]");
    EstimateReport rep = base_report(epsilon, delta, seed);
    Matroid base = m.with_fresh_counter();
    int n = base.size();
    int r = base.rank();
    Matroid dual = base.dual();
    int rd = dual.rank();
    rep.oracle_calls += base.oracle_calls() + dual.oracle_calls();

    // spanning probability as a positive sum over the sizes of failed sets:
    // sum_{k=0}^{n-r} N_k(dual) (1-p)^(n-k) p^k, N_k = independent k-sets
    auto coef = [&](int k) {
        double a = (n - k == 0) ? 0.0 : static_cast<double>(n - k) * std::log1p(-p);
        double b = (k == 0) ? 0.0 : static_cast<double>(k) * std::log(p);
        return a + b;
    };

    std::vector<double> log_terms;
    {
        TermRecord t0;
        t0.k = 0;
        t0.exact = true;
        t0.log_term = coef(0);
        rep.terms.push_back(t0);
        log_terms.push_back(t0.log_term);
    }
    std::uint64_t dual_loop_calls = 0;
    if (rd >= 1) {
        Matroid probe = dual.with_fresh_counter();
        int n1 = n - static_cast<int>(probe.loops().size());
        dual_loop_calls = probe.oracle_calls();
        TermRecord t1;
        t1.k = 1;
        t1.exact = true;
        t1.log_term = coef(1) + std::log(static_cast<double>(n1));
        rep.terms.push_back(t1);
        log_terms.push_back(t1.log_term);
    }
    rep.oracle_calls += dual_loop_calls;

    std::vector<int> candidates, levels_of;
    std::vector<double> log_upper;
    for (int k = 2; k <= rd; ++k) {
        candidates.push_back(k);
        log_upper.push_back(log_binomial(n, k) + coef(k));
        levels_of.push_back(k - 1);
    }
    double log_lower = log_sum_exp(log_terms);
    TermPlan plan = plan_terms(candidates, log_upper, log_lower, epsilon, delta, levels_of, rep.terms);

    std::uint64_t salt = 0;
    int deepest = 0;
    for (int k : plan.keep) {
        Matroid trunc = dual.truncate(k).with_fresh_counter();
        Piece piece = telescope_bases(trunc, plan.budget, plan.pld, seed, salt, workers, marginals);
        TermRecord tr;
        tr.k = k;
        tr.log_term = coef(k) + piece.log_value;
        tr.crude_upper = std::exp(log_binomial(n, k) + coef(k));
        tr.schedule = piece.schedule;
        tr.levels = std::move(piece.records);
        rep.samples_used += piece.samples;
        rep.oracle_calls += piece.calls + trunc.oracle_calls();
        log_terms.push_back(tr.log_term);
        if (piece.schedule.levels >= deepest) {
            deepest = piece.schedule.levels;
            rep.schedule = piece.schedule;
        }
        rep.terms.push_back(std::move(tr));
    }
    std::sort(rep.terms.begin(), rep.terms.end(),
              [](const TermRecord& a, const TermRecord& b) { return a.k < b.k; });
    finalize(rep, log_sum_exp(log_terms));
    return rep;
}

EstimateReport cluster_partition(const Matroid& m, double p, double q, double epsilon, double delta,
                                 std::uint64_t seed, int workers, const MarginalFn& marginals) {
    check_request(epsilon, delta, workers);
    if (!(q > 0.0 && q <= 1.0)) throw input_error("cluster_partition: q must lie in (0, 1]");
    if (!(p >= 0.0) || !std::isfinite(p))
        throw input_error("cluster_partition: p must be a finite nonnegative real");
    EstimateReport rep = base_report(epsilon, delta, seed);
    Matroid base = m.with_fresh_counter();
    int n = base.size();
    int r = base.rank();
    rep.oracle_calls += base.oracle_calls();
    double lq = std::log(q);
    double lp = std::log(p);  // -inf at p = 0, used only with k >= 1 guards

    // Z = q^(r+1) sum_k p^k f_k(1); f_0 = 1, f_1 and f_n in closed form,
    // interior layers by telescoping
    auto coef = [&](int k) { return k == 0 ? 0.0 : static_cast<double>(k) * lp; };

    std::vector<double> log_terms;
    {
        TermRecord t0;
        t0.k = 0;
        t0.exact = true;
        t0.log_term = 0.0;
        rep.terms.push_back(t0);
        log_terms.push_back(t0.log_term);
    }
    if (n >= 1 && p > 0.0) {
        std::uint64_t before = base.oracle_calls();
        int loops = static_cast<int>(base.loops().size());
        rep.oracle_calls += base.oracle_calls() - before;
        TermRecord t1;
        t1.k = 1;
        t1.exact = true;
        t1.log_term = coef(1) + std::log(static_cast<double>(loops) + static_cast<double>(n - loops) / q);
        rep.terms.push_back(t1);
        log_terms.push_back(t1.log_term);
    }
    if (n >= 2 && p > 0.0) {
        TermRecord tn;
        tn.k = n;
        tn.exact = true;
        tn.log_term = coef(n) - static_cast<double>(r) * lq;
        rep.terms.push_back(tn);
        log_terms.push_back(tn.log_term);
    }

    std::vector<int> candidates, levels_of;
    std::vector<double> log_upper;
    for (int k = 2; k <= n - 1; ++k) {
        candidates.push_back(k);
        log_upper.push_back(coef(k) + log_binomial(n, k) - std::min(k, r) * lq);
        levels_of.push_back(k - 1);
    }
    // every layer satisfies f_k >= C(n, k), so (1+p)^n lower-bounds the sum
    double log_lower = static_cast<double>(n) * std::log1p(p);
    TermPlan plan = plan_terms(candidates, log_upper, log_lower, epsilon, delta, levels_of, rep.terms);

    std::uint64_t salt = 0;
    int deepest = 0;
    for (int k : plan.keep) {
        Piece piece = telescope_cluster(base, k, q, plan.budget, plan.pld, seed, salt, workers, marginals);
        TermRecord tr;
        tr.k = k;
        tr.log_term = coef(k) + piece.log_value;
        tr.crude_upper = std::exp(coef(k) + log_binomial(n, k) - std::min(k, r) * lq);
        tr.schedule = piece.schedule;
        tr.levels = std::move(piece.records);
        rep.samples_used += piece.samples;
        rep.oracle_calls += piece.calls;
        log_terms.push_back(tr.log_term);
        if (piece.schedule.levels >= deepest) {
            deepest = piece.schedule.levels;
            rep.schedule = piece.schedule;
        }
        rep.terms.push_back(std::move(tr));
    }
    std::sort(rep.terms.begin(), rep.terms.end(),
              [](const TermRecord& a, const TermRecord& b) { return a.k < b.k; });
    finalize(rep, static_cast<double>(r + 1) * lq + log_sum_exp(log_terms));
    return rep;
}

EstimateReport tutte_eval(const Matroid& m, double x, double y, double epsilon, double delta,
                          std::uint64_t seed, int workers, const MarginalFn& marginals) {
    check_request(epsilon, delta, workers);
    if (!(y >= 1.0)) throw input_error("tutte_eval: requires y >= 1");
    if (!(x > 1.0)) throw input_error("tutte_eval: requires x > 1");
    double q = (x - 1.0) * (y - 1.0);
    if (!(q <= 1.0)) throw input_error("tutte_eval: requires (x-1)(y-1) <= 1");
    if (!(q > 0.0)) throw input_error("tutte_eval: requires (x-1)(y-1) > 0, so y must exceed 1");
    EstimateReport rep = cluster_partition(m, y - 1.0, q, epsilon, delta, seed, workers, marginals);
    double shift = -std::log(x - 1.0) - static_cast<double>(m.rank() + 1) * std::log(y - 1.0);
    finalize(rep, rep.log_estimate + shift);
    return rep;
}

EstimateReport dpp_partition(const Eigen::MatrixXd& l, int k, double alpha, double epsilon, double delta,
                             std::uint64_t seed, int workers, const MarginalFn& marginals) {
    check_request(epsilon, delta, workers);
    if (k > 0) HomogeneousDistribution::make_dpp_alpha(l, k, alpha);  // validates kernel and support
    else if (k < 0 || l.rows() != l.cols() || l.rows() < 1)
        throw input_error("dpp_partition: k must be nonnegative and the kernel square and nonempty");
    EstimateReport rep = base_report(epsilon, delta, seed);
    std::uint64_t salt = 0;
    int planned = (k >= 2 && k < static_cast<int>(l.rows())) ? k - 1 : 0;
    double pld = delta / std::max(1, planned);
    Piece p = telescope_dpp(l, k, alpha, epsilon, pld, seed, salt, workers, marginals);
    finalize(rep, p.log_value);
    rep.samples_used = p.samples;
    rep.oracle_calls = p.calls;
    rep.schedule = p.schedule;
    rep.levels = std::move(p.records);
    return rep;
}

}  // namespace matwalk
