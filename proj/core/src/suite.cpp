#include "matwalk/suite.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "matwalk/certify.hpp"
#include "matwalk/cli.hpp"
#include "matwalk/complex.hpp"
#include "matwalk/counting.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/exact.hpp"
#include "matwalk/matroid_parse.hpp"
#include "matwalk/rng.hpp"
#include "matwalk/sampler.hpp"
#include "matwalk/walks.hpp"

namespace matwalk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

const std::vector<SuiteInstance>& acceptance_suite() {
    static const std::vector<SuiteInstance> suite = {
        {"u24", R"({"type":"uniform","n":4,"r":2})", 6, "C(4,2)"},
        {"u36", R"({"type":"uniform","n":6,"r":3})", 20, "C(6,3)"},
        {"k4", R"({"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]})", 16,
         "spanning trees of K4, 4^2 by the matrix-tree theorem"},
        {"k5",
         R"({"type":"graphic","vertices":5,"edges":[[0,1],[0,2],[0,3],[0,4],[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]]})",
         125, "spanning trees of K5, 5^3"},
        {"k4_trunc2",
         R"({"type":"truncation","k":2,"inner":{"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}})",
         15, "every 2-edge subset of K4 is acyclic, C(6,2)"},
        {"fano",
         R"({"type":"linear","field":2,"matrix":[[1,0,0,1,1,0,1],[0,1,0,1,0,1,1],[0,0,1,0,1,1,1]]})", 28,
         "C(7,3) minus the 7 dependent lines"},
        {"partition222", R"({"type":"partition","blocks":[[0,1],[2,3],[4,5]],"caps":[1,1,1]})", 8,
         "one of two choices per block, 2^3"},
        {"k4_dual",
         R"({"type":"dual","inner":{"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}})",
         16, "duality preserves the number of bases"},
        {"k4_contract0",
         R"({"type":"contract","set":[0],"inner":{"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}})",
         8, "spanning trees of K4 through a fixed edge, 16/2"},
        {"u36_trunc2", R"({"type":"truncation","k":2,"inner":{"type":"uniform","n":6,"r":3}})", 15,
         "C(6,2)"},
        {"fano_dual",
         R"({"type":"dual","inner":{"type":"linear","field":2,"matrix":[[1,0,0,1,1,0,1],[0,1,0,1,0,1,1],[0,0,1,0,1,1,1]]}})",
         28, "duality preserves the number of bases"},
    };
    return suite;
}

Matroid load_instance(const SuiteInstance& inst) {
    Matroid m = parse_matroid(inst.matroid_json);
    std::int64_t count = static_cast<std::int64_t>(enumerate_bases(m).size());
    if (count != inst.expected_bases)
        throw state_error("suite instance " + inst.name + ": enumeration found " + std::to_string(count) +
                          " bases, expected " + std::to_string(inst.expected_bases) + " (" + inst.note + ")");
    return m;
}

namespace {

struct Loaded {
    std::string name;
    Matroid m;
};

std::vector<Loaded> load_all() {
    std::vector<Loaded> out;
    for (const SuiteInstance& inst : acceptance_suite()) out.push_back({inst.name, load_instance(inst)});
    return out;
}

// materialized chain cases: uniform bases for every suite matroid, cluster
// layers over a (k, q) grid, and dpp kernels over an alpha grid
struct BuiltCase {
    std::string name;
    HomogeneousDistribution mu;
    ExplicitPolynomial poly;
    WeightedComplex x;
};

Eigen::MatrixXd seeded_kernel(int n, std::uint64_t seed) {
    StreamRng rng(seed, 0, 0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.next_double();
    Eigen::MatrixXd l = a.transpose() * a + 0.1 * Eigen::MatrixXd::Identity(n, n);
    return 0.5 * (l + l.transpose());
}

BuiltCase build_case(std::string name, HomogeneousDistribution mu) {
    ExplicitPolynomial poly = materialize(mu, 1u << 20);
    WeightedComplex x = build_complex(poly);
    return {std::move(name), std::move(mu), std::move(poly), std::move(x)};
}

std::vector<BuiltCase> build_cases(const std::vector<Loaded>& suite) {
    std::vector<BuiltCase> out;
    for (const Loaded& it : suite)
        out.push_back(build_case(it.name + " uniform-bases", HomogeneousDistribution::make_uniform_bases(it.m)));
    for (const Loaded& it : suite) {
        int r = it.m.rank();
        if (r < 1) continue;
        std::vector<int> ks{(r + 1) / 2, r};
        if (ks[0] == ks[1]) ks.pop_back();
        for (double q : {0.25, 0.5, 1.0})
            for (int k : ks)
                out.push_back(build_case(it.name + " cluster k=" + std::to_string(k) + " q=" + fmt(q),
                                          HomogeneousDistribution::make_cluster_layer(it.m, k, q)));
    }
    for (int n : {6, 8}) {
        Eigen::MatrixXd l = seeded_kernel(n, 0xd90 + static_cast<std::uint64_t>(n));
        for (int k : {2, 3})
            for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0})
                out.push_back(build_case("dpp n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                             " alpha=" + fmt(alpha),
                                         HomogeneousDistribution::make_dpp_alpha(l, k, alpha)));
    }
    return out;
}

struct Failures {
    int count = 0;
    std::string first;
    void add(const std::string& what) {
        ++count;
        if (first.empty()) first = what;
    }
    std::string brief() const {
        return first + (count > 1 ? " (+" + std::to_string(count - 1) + " more)" : "");
    }
};

CriterionResult criterion_axioms(const std::vector<Loaded>& suite) {
    CriterionResult res{1, "matroid axioms and rank identities", false, 0.0, ""};
    Failures bad;
    int checked = 0;
    for (const Loaded& it : suite) {
        int n = it.m.size();
        if (n > 12) continue;
        ++checked;
        std::uint64_t full = 1ull << n;
        std::vector<char> ind(full);
        std::vector<int> rk(full);
        for (std::uint64_t s = 0; s < full; ++s) {
            ind[s] = it.m.is_independent(Subset(s)) ? 1 : 0;
            rk[s] = it.m.rank_of(Subset(s));
        }
        for (std::uint64_t s = 0; s < full; ++s) {
            if (!ind[s]) continue;
            for (int e = 0; e < n; ++e)
                if ((s >> e) & 1u)
                    if (!ind[s ^ (1ull << e)]) bad.add(it.name + ": hereditary fails at " + Subset(s).str());
        }
        std::vector<std::uint64_t> indep;
        for (std::uint64_t s = 0; s < full; ++s)
            if (ind[s]) indep.push_back(s);
        for (std::uint64_t a : indep)
            for (std::uint64_t b : indep) {
                if (std::popcount(a) >= std::popcount(b)) continue;
                bool found = false;
                std::uint64_t augment = b & ~a;
                while (augment && !found) {
                    std::uint64_t bit = augment & (~augment + 1);
                    if (ind[a | bit]) found = true;
                    augment ^= bit;
                }
                if (!found)
                    bad.add(it.name + ": exchange fails for " + Subset(a).str() + " into " + Subset(b).str());
            }
        for (std::uint64_t a = 0; a < full; ++a)
            for (std::uint64_t b = 0; b < full; ++b)
                if (rk[a | b] + rk[a & b] > rk[a] + rk[b]) {
                    bad.add(it.name + ": submodularity fails at " + Subset(a).str() + ", " + Subset(b).str());
                    b = full;  // one report per instance pair scan
                }
        Matroid dm = it.m.dual();
        int rfull = rk[full - 1];
        for (std::uint64_t s = 0; s < full; ++s) {
            int expect = std::popcount(s) + rk[(full - 1) ^ s] - rfull;
            if (dm.rank_of(Subset(s)) != expect) bad.add(it.name + ": dual rank identity fails at " + Subset(s).str());
        }
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(checked) + " matroids checked over all subsets" : bad.brief();
    return res;
}

CriterionResult criterion_gap(const std::vector<BuiltCase>& cases) {
    CriterionResult res{2, "chain second eigenvalue at most 1 - 1/d", false, 0.0, ""};
    Failures bad;
    double worst = -2.0;
    std::string worst_name;
    for (const BuiltCase& c : cases) {
        WalkMatrix chain = lower_walk(c.x, c.x.d);
        Spectrum s = spectrum(chain);
        double l2 = s.eigenvalues.size() > 1 ? s.eigenvalues[1] : -1.0;
        double slack = l2 - (1.0 - 1.0 / c.x.d);
        if (slack > worst) {
            worst = slack;
            worst_name = c.name;
        }
        if (slack > 1e-9) bad.add(c.name + ": second eigenvalue exceeds bound by " + fmt(slack));
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(cases.size()) + " chains, worst slack " + fmt(worst) + " (" +
                                worst_name + ")"
                          : bad.brief();
    return res;
}

// sorted-descending comparison padding the shorter spectrum with zeros;
// valid because both walks are positive semidefinite up to roundoff
bool spectra_agree(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        double av = i < a.size() ? a[i] : 0.0;
        double bv = i < b.size() ? b[i] : 0.0;
        if (std::abs(av - bv) > tol) return false;
    }
    return true;
}

CriterionResult criterion_spectra(const std::vector<BuiltCase>& cases) {
    CriterionResult res{3, "eigenvalue counts, shared spectra, walk domination", false, 0.0, ""};
    Failures bad;
    int tables = 0;
    for (const BuiltCase& c : cases) {
        WalkMatrix chain = lower_walk(c.x, c.x.d);
        Spectrum cs = spectrum(chain);
        if (cs.eigenvalues.back() < -1e-9)
            bad.add(c.name + ": chain has eigenvalue " + fmt(cs.eigenvalues.back()) + " below zero");
        for (int k = 1; k < c.x.d; ++k) {
            ++tables;
            CheckReport counts = eigenvalue_count_check(c.x, k);
            if (!counts.pass) bad.add(c.name + " level " + std::to_string(k) + ": " + counts.detail);
            Spectrum up = spectrum(upper_walk(c.x, k));
            Spectrum low = spectrum(lower_walk(c.x, k + 1));
            if (!spectra_agree(up.eigenvalues, low.eigenvalues, 1e-9))
                bad.add(c.name + " level " + std::to_string(k) + ": up/down spectra disagree");
            CheckReport dom = loewner_domination_check(c.x, k);
            if (!dom.pass) bad.add(c.name + " level " + std::to_string(k) + ": " + dom.detail);
        }
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(tables) + " level tables across " + std::to_string(cases.size()) +
                                " complexes"
                          : bad.brief();
    return res;
}

CriterionResult criterion_hessian(const std::vector<BuiltCase>& cases) {
    CriterionResult res{4, "hessian-walk identity and weight identities", false, 0.0, ""};
    Failures bad;
    double worst_entry = 0.0, worst_weight = 0.0;
    int links = 0;
    for (const BuiltCase& c : cases) {
        const WeightedComplex& x = c.x;
        for (int k = 0; k + 2 <= x.d; ++k)
            for (const Subset& tau : x.faces[static_cast<std::size_t>(k)]) {
                ++links;
                WalkMatrix lw = local_walk(x, tau);
                WalkMatrix nh = normalized_hessian(c.poly, tau);
                if (lw.faces != nh.faces) {
                    bad.add(c.name + ": hessian rows differ from link at " + tau.str());
                    continue;
                }
                double diff = (lw.p - nh.p).cwiseAbs().maxCoeff();
                worst_entry = std::max(worst_entry, diff);
                if (diff > 1e-12)
                    bad.add(c.name + ": hessian mismatch " + fmt(diff) + " at " + tau.str());
            }
        // w(tau) = (d-k)! sum of top weights over maximal faces containing tau,
        // and each weight equals the sum over its covers
        const auto& top = x.faces[static_cast<std::size_t>(x.d)];
        const auto& topw = x.weights[static_cast<std::size_t>(x.d)];
        for (int k = 0; k <= x.d; ++k) {
            double factorial = 1.0;
            for (int t = 2; t <= x.d - k; ++t) factorial *= t;
            for (std::size_t i = 0; i < x.faces[static_cast<std::size_t>(k)].size(); ++i) {
                Subset tau = x.faces[static_cast<std::size_t>(k)][i];
                double w = x.weights[static_cast<std::size_t>(k)][i];
                double sum = 0.0;
                for (std::size_t j = 0; j < top.size(); ++j)
                    if (top[j].contains_all(tau)) sum += topw[j];
                double rel = std::abs(w - factorial * sum) / std::max(1e-300, std::abs(w));
                worst_weight = std::max(worst_weight, rel);
                if (rel > 1e-12) bad.add(c.name + ": weight identity off by " + fmt(rel) + " at " + tau.str());
                if (k < x.d) {
                    double covers = 0.0;
                    for (std::size_t j = 0; j < x.faces[static_cast<std::size_t>(k + 1)].size(); ++j)
                        if (x.faces[static_cast<std::size_t>(k + 1)][j].contains_all(tau))
                            covers += x.weights[static_cast<std::size_t>(k + 1)][j];
                    double relc = std::abs(w - covers) / std::max(1e-300, std::abs(w));
                    worst_weight = std::max(worst_weight, relc);
                    if (relc > 1e-12) bad.add(c.name + ": cover sum off by " + fmt(relc) + " at " + tau.str());
                }
            }
        }
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(links) + " links, worst entry gap " + fmt(worst_entry) +
                                ", worst weight gap " + fmt(worst_weight)
                          : bad.brief();
    return res;
}

CriterionResult criterion_log_concavity(const std::vector<BuiltCase>& cases) {
    CriterionResult res{5, "log-concavity certification", false, 0.0, ""};
    Failures bad;
    for (const BuiltCase& c : cases) {
        CheckReport r = check_strong_log_concavity(c.poly);
        if (!r.pass) bad.add(c.name + ": " + r.detail);
    }
    ExplicitPolynomial split = ExplicitPolynomial::from_terms(
        4, 2, {{Subset{}.with(0).with(1), 1.0}, {Subset{}.with(2).with(3), 1.0}});
    CheckReport counter = check_strong_log_concavity(split);
    if (counter.pass) bad.add("decomposable polynomial x0 x1 + x2 x3 was wrongly certified");
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(cases.size()) + " families certified, decomposable counterexample rejected"
                          : bad.brief();
    return res;
}

CriterionResult criterion_mixing(const std::vector<BuiltCase>& cases) {
    CriterionResult res{6, "mixing bound on exact total variation", false, 0.0, ""};
    Failures bad;
    double worst_ratio = 0.0;
    for (const BuiltCase& c : cases) {
        WalkMatrix chain = lower_walk(c.x, c.x.d);
        std::size_t m = chain.faces.size();
        Subset start = c.mu.canonical_start();
        std::size_t s0 = m;
        for (std::size_t i = 0; i < m; ++i)
            if (chain.faces[i] == start) s0 = i;
        if (s0 == m) {
            bad.add(c.name + ": canonical start outside the support");
            continue;
        }
        Eigen::VectorXd pi(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) pi(static_cast<Eigen::Index>(i)) = chain.w[i];
        pi /= pi.sum();
        double log_mu = std::log(pi(static_cast<Eigen::Index>(s0)));
        std::int64_t t1 = mixing_bound(c.x.d, log_mu, 0.1);
        std::int64_t t2 = mixing_bound(c.x.d, log_mu, 0.01);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(m));
        row(static_cast<Eigen::Index>(s0)) = 1.0;
        for (std::int64_t t = 0; t <= std::max(t1, t2); ++t) {
            double tv = (row.transpose() - pi).cwiseAbs().sum();
            if (t == t1) {
                worst_ratio = std::max(worst_ratio, tv / 0.1);
                if (tv > 0.1) bad.add(c.name + ": tv " + fmt(tv) + " above 0.1 at step " + std::to_string(t1));
            }
            if (t == t2) {
                worst_ratio = std::max(worst_ratio, tv / 0.01);
                if (tv > 0.01) bad.add(c.name + ": tv " + fmt(tv) + " above 0.01 at step " + std::to_string(t2));
            }
            if (t < std::max(t1, t2)) row = row * chain.p;
        }
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(cases.size()) + " chains, worst tv/target ratio " + fmt(worst_ratio)
                          : bad.brief();
    return res;
}

CriterionResult criterion_expansion(const std::vector<Loaded>& suite) {
    CriterionResult res{7, "bases-exchange expansion and conductance", false, 0.0, ""};
    Failures bad;
    double min_expansion = std::numeric_limits<double>::infinity();
    int expanded = 0;
    for (const Loaded& it : suite) {
        BasesExchangeGraph g = bases_exchange_graph(it.m);
        // connectivity by breadth-first search
        std::vector<char> seen(g.bases.size(), 0);
        std::vector<std::size_t> queue{0};
        seen[0] = 1;
        while (!queue.empty()) {
            std::size_t v = queue.back();
            queue.pop_back();
            for (int u : g.neighbors[v])
                if (!seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    queue.push_back(static_cast<std::size_t>(u));
                }
        }
        if (std::count(seen.begin(), seen.end(), 1) != static_cast<std::ptrdiff_t>(g.bases.size()))
            bad.add(it.name + ": exchange graph is disconnected");
        CheckReport fact = transition_bound_check(it.m);
        if (!fact.pass) bad.add(it.name + ": " + fact.detail);
        if (g.bases.size() <= 20) {
            ++expanded;
            double ex = exact_expansion(g);
            min_expansion = std::min(min_expansion, ex);
            if (!(ex >= 1.0 - 1e-12)) bad.add(it.name + ": expansion " + fmt(ex) + " below 1");
            CheckReport ch = conductance_vs_cheeger(it.m);
            if (!ch.pass) bad.add(it.name + ": " + ch.detail);
        }
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(expanded) + " graphs expanded exactly, min expansion " +
                                fmt(min_expansion)
                          : bad.brief();
    return res;
}

CriterionResult criterion_confidence(const std::vector<Loaded>& suite, int workers, std::ostream& log) {
    CriterionResult res{8, "estimator confidence over 200 seeded runs", false, 0.0, ""};
    Failures bad;
    auto by_name = [&](const std::string& n) -> const Matroid& {
        for (const Loaded& it : suite)
            if (it.name == n) return it.m;
        throw state_error("suite instance missing: " + n);
    };
    struct Family {
        std::string name;
        double truth;
        std::function<double(std::uint64_t)> estimate;
    };
    const Matroid& u24 = by_name("u24");
    const Matroid& k4 = by_name("k4");
    const Matroid& fano = by_name("fano");
    std::vector<Family> families;
    families.push_back({"count u24", 6.0, [&](std::uint64_t s) {
                            return count_bases(u24, 0.1, 0.05, s, workers).estimate;
                        }});
    families.push_back({"count k4", 16.0, [&](std::uint64_t s) {
                            return count_bases(k4, 0.1, 0.05, s, workers).estimate;
                        }});
    families.push_back({"count fano", 28.0, [&](std::uint64_t s) {
                            return count_bases(fano, 0.1, 0.05, s, workers).estimate;
                        }});
    families.push_back({"cluster k4", std::exp(exact_cluster_z_log(k4, 1.0, 0.5)), [&](std::uint64_t s) {
                            return cluster_partition(k4, 1.0, 0.5, 0.1, 0.05, s, workers).estimate;
                        }});
    families.push_back({"reliability k4", exact_reliability(k4, 0.5), [&](std::uint64_t s) {
                            return reliability(k4, 0.5, 0.1, 0.05, s, workers).estimate;
                        }});
    std::ostringstream tally;
    for (const Family& f : families) {
        int hits = 0;
        for (int i = 0; i < 200; ++i) {
            double est = f.estimate(static_cast<std::uint64_t>(i) + 1);
            if (est >= 0.9 * f.truth && est <= 1.1 * f.truth) ++hits;
        }
        log << "    " << f.name << ": " << hits << "/200 within 10%\n" << std::flush;
        tally << (tally.tellp() > 0 ? ", " : "") << f.name << " " << hits << "/200";
        if (hits < 180) bad.add(f.name + ": only " + std::to_string(hits) + "/200 runs within 10%");
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? tally.str() : bad.brief();
    return res;
}

CriterionResult criterion_closed_forms(const std::vector<Loaded>& suite, int workers) {
    CriterionResult res{9, "closed-form identities", false, 0.0, ""};
    Failures bad;
    auto rel_log_gap = [](double log_lhs, double log_rhs) {
        return std::abs(log_lhs - log_rhs);  // log-space gap bounds relative error tightly near 0
    };
    for (const Loaded& it : suite) {
        if (it.m.size() > 20) continue;
        double lhs = exact_cluster_z_log(it.m, 0.7, 1.0);
        double rhs = static_cast<double>(it.m.size()) * std::log1p(0.7);
        if (rel_log_gap(lhs, rhs) > 1e-12) bad.add(it.name + ": q=1 partition misses (1+p)^n");
        double l22 = exact_cluster_z_log(it.m, 1.0, 1.0);
        if (rel_log_gap(l22, it.m.size() * std::log(2.0)) > 1e-12)
            bad.add(it.name + ": (2,2) evaluation misses 2^n");
    }
    const Matroid& k4 = [&]() -> const Matroid& {
        for (const Loaded& it : suite)
            if (it.name == "k4") return it.m;
        throw state_error("suite instance missing: k4");
    }();
    double zq1 = cluster_partition(k4, 0.7, 1.0, 0.1, 0.05, 901, workers).estimate;
    double zq1_true = std::pow(1.7, 6);
    if (std::abs(zq1 - zq1_true) > 0.1 * zq1_true) bad.add("cluster estimator at q=1 off by more than 10%");
    double t22 = tutte_eval(k4, 2.0, 2.0, 0.1, 0.05, 902, workers).estimate;
    if (std::abs(t22 - 64.0) > 6.4) bad.add("tutte estimator at (2,2) off by more than 10% of 64");
    Matroid triangle = graphic_matroid(3, {{0, 1}, {0, 2}, {1, 2}});
    if (rel_log_gap(exact_cluster_z_log(triangle, 1.0, 1.0), 3.0 * std::log(2.0)) > 1e-12)
        bad.add("triangle (2,2) evaluation misses 2^3");
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
    for (double alpha : {0.0, 0.5, 1.0})
        if (rel_log_gap(exact_dpp_partition_log(eye, 3, alpha), std::log(20.0)) > 1e-12)
            bad.add("identity-kernel dpp sum misses C(6,3) at alpha " + fmt(alpha));
    double dz = dpp_partition(eye, 3, 0.5, 0.1, 0.05, 903, workers).estimate;
    if (std::abs(dz - 20.0) > 2.0) bad.add("dpp estimator off by more than 10% of C(6,3)");
    Matroid u12 = uniform_matroid(2, 1);
    for (double p : {0.3, 0.5}) {
        double want = 1.0 - p * p;
        if (std::abs(exact_reliability(u12, p) - want) > 1e-12 * want)
            bad.add("exact reliability of the two-element rank-one matroid misses 1-p^2");
        double est = reliability(u12, p, 0.1, 0.05, 904, workers).estimate;
        if (std::abs(est - want) > 1e-12 * want)
            bad.add("reliability estimator misses 1-p^2 on its all-exact path");
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? "partition, tutte, dpp and reliability identities hold" : bad.brief();
    return res;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CriterionResult criterion_determinism(std::ostream& log) {
    CriterionResult res{10, "bit-identical reruns for every randomized command", false, 0.0, ""};
    Failures bad;
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "matwalk_acceptance";
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        out << text;
        return (dir / name).string();
    };
    std::string u24 = put("u24.json", R"({"type":"uniform","n":4,"r":2})");
    std::string k4 = put("k4.json",
                         R"({"type":"graphic","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]})");
    std::string u24_dist = put("u24_dist.json", R"({"type":"uniform_bases","matroid":{"type":"uniform","n":4,"r":2}})");
    std::string dpp = put("dpp.json",
                          R"({"type":"dpp_alpha","kernel":[[2,0.5,0,0],[0.5,2,0.5,0],[0,0.5,2,0.5],[0,0,0.5,2]],"k":2,"alpha":0.5})");

    struct Command {
        std::string name;
        std::vector<std::string> args;
        bool parallel;  // also rerun under --workers 2
    };
    std::vector<Command> commands = {
        {"sample", {"sample", "--dist", u24_dist, "--count", "40", "--eps", "0.1", "--seed", "11"}, true},
        {"count-bases", {"count-bases", "--matroid", k4, "--eps", "0.3", "--delta", "0.2", "--seed", "5"}, true},
        {"count-indep", {"count-indep", "--matroid", k4, "--k", "2", "--eps", "0.3", "--delta", "0.2", "--seed", "5"}, false},
        {"reliability", {"reliability", "--matroid", k4, "--p", "0.5", "--eps", "0.4", "--delta", "0.2", "--seed", "5"}, false},
        {"cluster", {"cluster", "--matroid", u24, "--p", "1", "--q", "0.5", "--eps", "0.4", "--delta", "0.2", "--seed", "3"}, true},
        {"tutte", {"tutte", "--matroid", u24, "--x", "2", "--y", "2", "--eps", "0.4", "--delta", "0.2", "--seed", "3"}, false},
        {"dpp-z", {"dpp-z", "--dist", dpp, "--eps", "0.4", "--delta", "0.2", "--seed", "5"}, false},
    };
    for (const Command& cmd : commands) {
        auto run_once = [&](const std::string& tag, const std::vector<std::string>& extra) -> std::string {
            fs::path out = dir / (cmd.name + "_" + tag + ".json");
            std::vector<std::string> args = cmd.args;
            for (const std::string& e : extra) args.push_back(e);
            args.push_back("--out");
            args.push_back(out.string());
            int code = run(args);
            if (code != 0) {
                bad.add(cmd.name + ": exit code " + std::to_string(code));
                return "";
            }
            return slurp(out);
        };
        std::string a = run_once("a", {});
        std::string b = run_once("b", {});
        if (a != b || a.empty()) bad.add(cmd.name + ": reruns differ");
        if (cmd.parallel) {
            std::string c = run_once("c", {"--workers", "2"});
            std::string d = run_once("d", {"--workers", "2"});
            if (c != d || c.empty()) bad.add(cmd.name + ": reruns differ under --workers 2");
            if (cmd.name == "sample") {
                // the drawn subsets must not depend on the worker count;
                // only the metadata record (oracle-call tally) may
                auto lines_before_meta = [](const std::string& text) {
                    std::size_t cut = text.rfind('\n', text.size() > 1 ? text.size() - 2 : 0);
                    return text.substr(0, cut == std::string::npos ? 0 : cut);
                };
                if (lines_before_meta(a) != lines_before_meta(c))
                    bad.add("sample: drawn subsets changed with the worker count");
            }
        }
        log << "    " << cmd.name << ": reruns identical\n" << std::flush;
    }
    res.pass = bad.count == 0;
    res.detail = res.pass ? std::to_string(commands.size()) + " commands byte-stable" : bad.brief();
    return res;
}

CriterionResult timed(std::ostream& log, CriterionResult (*f)(const std::vector<Loaded>&),
                      const std::vector<Loaded>& suite) {
    Clock::time_point t0 = Clock::now();
    CriterionResult r = f(suite);
    r.seconds = seconds_since(t0);
    return r;
}

void emit(std::ostream& log, const CriterionResult& r) {
    log << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " | " << r.detail
        << " [" << fmt(r.seconds) << " s]\n"
        << std::flush;
}

}  // namespace

bool all_pass(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

std::vector<CriterionResult> run_acceptance_suite(std::ostream& log, int workers) {
    std::vector<CriterionResult> results;
    std::vector<Loaded> suite = load_all();
    std::vector<BuiltCase> cases = build_cases(suite);
    log << "suite: " << suite.size() << " matroids, " << cases.size() << " materialized chains\n" << std::flush;

    auto push = [&](CriterionResult r) {
        emit(log, r);
        results.push_back(std::move(r));
    };

    push(timed(log, criterion_axioms, suite));

    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_gap(cases);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_spectra(cases);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_hessian(cases);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_log_concavity(cases);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_mixing(cases);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    push(timed(log, criterion_expansion, suite));
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_confidence(suite, workers, log);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_closed_forms(suite, workers);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    {
        Clock::time_point t0 = Clock::now();
        CriterionResult r = criterion_determinism(log);
        r.seconds = seconds_since(t0);
        push(std::move(r));
    }
    return results;
}

}  // namespace matwalk
