#include "matwalk/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "matwalk/complex.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/walks.hpp"

namespace matwalk {

namespace {

constexpr double kEnumBudget = 1e6;

double binomial_or_inf(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double v = 1.0;
    for (int i = 1; i <= k; ++i) {
        v *= static_cast<double>(n - k + i) / i;
        if (v > 1e18) return std::numeric_limits<double>::infinity();
    }
    return v;
}

void check_layer_budget(int n, int k, const char* who) {
    if (binomial_or_inf(n, k) > kEnumBudget)
        throw resource_error(std::string(who) + ": C(" + std::to_string(n) + ", " + std::to_string(k) +
                             ") exceeds the 10^6 enumeration budget");
}

// next mask with the same popcount (Gosper); caller stops past the range
std::uint64_t next_combination(std::uint64_t v) {
    std::uint64_t c = v & (~v + 1), r = v + c;
    return (((r ^ v) >> 2) / c) | r;
}

template <typename F>
void for_each_subset_of_size(int n, int k, F&& f) {
    if (k < 0 || k > n) return;
    if (k == 0) {
        f(Subset(0));
        return;
    }
    std::uint64_t limit = n >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n);
    std::uint64_t v = (std::uint64_t(1) << k) - 1;
    while (v < limit) {
        f(Subset(v));
        if (v == 0) break;
        v = next_combination(v);
    }
}

double kahan_log_sum(const std::vector<double>& logs) {
    double m = log_zero();
    for (double x : logs)
        if (x > m) m = x;
    if (is_log_zero(m)) return m;
    return m + std::log(sum_exp_shifted(logs, m));
}

// fraction-free Bareiss determinant of an integer matrix
std::int64_t bareiss_det(std::vector<std::vector<std::int64_t>> a) {
    int n = static_cast<int>(a.size());
    if (n == 0) return 1;
    std::int64_t prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[static_cast<size_t>(k)][static_cast<size_t>(k)] == 0) {
            int swap_row = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[static_cast<size_t>(i)][static_cast<size_t>(k)] != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row < 0) return 0;
            std::swap(a[static_cast<size_t>(k)], a[static_cast<size_t>(swap_row)]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                __int128 num = static_cast<__int128>(a[static_cast<size_t>(i)][static_cast<size_t>(j)]) *
                                   a[static_cast<size_t>(k)][static_cast<size_t>(k)] -
                               static_cast<__int128>(a[static_cast<size_t>(i)][static_cast<size_t>(k)]) *
                                   a[static_cast<size_t>(k)][static_cast<size_t>(j)];
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<std::int64_t>(num / prev);
            }
        prev = a[static_cast<size_t>(k)][static_cast<size_t>(k)];
    }
    return sign * a[static_cast<size_t>(n) - 1][static_cast<size_t>(n) - 1];
}

}  // namespace

std::vector<Subset> enumerate_bases(const Matroid& m) {
    int n = m.size(), r = m.rank();
    check_layer_budget(n, r, "enumerate_bases");
    std::vector<Subset> out;
    // lex backtracking; dependent prefixes cannot extend to a basis
    struct Walker {
        const Matroid& m;
        int n, r;
        std::vector<Subset>& out;
        void visit(Subset t, int next) {
            if (t.size() == r) {
                out.push_back(t);
                return;
            }
            for (int j = next; j <= n - (r - t.size()); ++j)
                if (m.is_independent(t.with(j))) visit(t.with(j), j + 1);
        }
    };
    Walker w{m, n, r, out};
    w.visit(Subset(0), 0);
    return out;
}

double exact_partition_log(const HomogeneousDistribution& mu) {
    check_layer_budget(mu.ground_size(), mu.degree(), "exact_partition_log");
    std::vector<double> logs;
    for_each_subset_of_size(mu.ground_size(), mu.degree(), [&](Subset s) {
        double lw = mu.log_weight(s);
        if (!is_log_zero(lw)) logs.push_back(lw);
    });
    return kahan_log_sum(logs);
}

double exact_cluster_z_log(const Matroid& m, double p, double q) {
    if (!(p >= 0.0)) throw input_error("exact_cluster_z_log: p must be >= 0");
    if (!(q > 0.0 && q <= 1.0)) throw input_error("exact_cluster_z_log: q must be in (0, 1]");
    int n = m.size();
    if (n > 24) throw resource_error("exact_cluster_z_log: 2^" + std::to_string(n) + " exceeds the 2^24 budget");
    int r = m.rank();
    double lp = std::log(p), lq = std::log(q);
    std::vector<double> logs;
    logs.reserve(std::size_t(1) << n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        Subset s(mask);
        int sz = s.size();
        if (p == 0.0 && sz > 0) continue;
        double lt = (r + 1 - m.rank_of(s)) * lq + (sz > 0 ? sz * lp : 0.0);
        logs.push_back(lt);
    }
    return kahan_log_sum(logs);
}

double exact_reliability(const Matroid& m, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("exact_reliability: p must be in [0, 1]");
    int n = m.size(), r = m.rank();
    if (n > 24) throw resource_error("exact_reliability: 2^" + std::to_string(n) + " exceeds the 2^24 budget");
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        Subset s(mask);
        if (m.rank_of(s) != r) continue;
        int sz = s.size();
        double term = std::pow(1.0 - p, sz) * std::pow(p, n - sz);
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double exact_dpp_partition_log(const Eigen::MatrixXd& l, int k, double alpha) {
    if (l.rows() != l.cols()) throw input_error("exact_dpp_partition_log: kernel must be square");
    int n = static_cast<int>(l.rows());
    if (k < 0 || k > n) throw input_error("exact_dpp_partition_log: k must be in [0, n]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw input_error("exact_dpp_partition_log: alpha must be in [0, 1]");
    check_layer_budget(n, k, "exact_dpp_partition_log");
    HomogeneousDistribution mu = HomogeneousDistribution::make_dpp_alpha(l, k, alpha);
    return exact_partition_log(mu);
}

BasesExchangeGraph bases_exchange_graph(const Matroid& m) {
    BasesExchangeGraph g;
    g.bases = enumerate_bases(m);
    size_t nb = g.bases.size();
    if (nb > 20000)
        throw resource_error("bases_exchange_graph: " + std::to_string(nb) + " bases exceed the pairwise budget");
    g.neighbors.assign(nb, {});
    if (nb <= 32) g.adj.assign(nb, 0);
    for (size_t i = 0; i < nb; ++i)
        for (size_t j = i + 1; j < nb; ++j) {
            if (std::popcount(g.bases[i].mask() ^ g.bases[j].mask()) != 2) continue;
            g.neighbors[i].push_back(static_cast<int>(j));
            g.neighbors[j].push_back(static_cast<int>(i));
            if (nb <= 32) {
                g.adj[i] |= std::uint32_t(1) << j;
                g.adj[j] |= std::uint32_t(1) << i;
            }
            ++g.edge_count;
        }
    return g;
}

double exact_expansion(const BasesExchangeGraph& g) {
    int nv = static_cast<int>(g.bases.size());
    if (nv > 22) throw resource_error("exact_expansion: " + std::to_string(nv) + " vertices exceed the 22-vertex budget");
    if (nv <= 1) return std::numeric_limits<double>::infinity();
    std::int64_t best_num = 1, best_den = 0;  // represents +infinity
    std::uint32_t s = 0;
    int cut = 0, size = 0;
    std::uint64_t total = std::uint64_t(1) << nv;
    for (std::uint64_t i = 1; i < total; ++i) {
        std::uint32_t gray = static_cast<std::uint32_t>(i ^ (i >> 1));
        int v = std::countr_zero(static_cast<std::uint32_t>(gray ^ s));
        std::uint32_t bit = std::uint32_t(1) << v;
        if (gray & bit) {
            cut += std::popcount(g.adj[static_cast<size_t>(v)] & ~gray) -
                   std::popcount(g.adj[static_cast<size_t>(v)] & s);
            ++size;
        } else {
            cut += std::popcount(g.adj[static_cast<size_t>(v)] & gray) -
                   std::popcount(g.adj[static_cast<size_t>(v)] & ~s & ~bit);
            --size;
        }
        s = gray;
        if (size >= 1 && 2 * size <= nv) {
            if (best_den == 0 || static_cast<std::int64_t>(cut) * best_den <
                                     best_num * static_cast<std::int64_t>(size)) {
                best_num = cut;
                best_den = size;
            }
        }
    }
    return static_cast<double>(best_num) / static_cast<double>(best_den);
}

std::uint64_t kirchhoff_count(int vertices, const std::vector<std::pair<int, int>>& edges) {
    if (vertices < 0) throw input_error("kirchhoff_count: negative vertex count");
    std::vector<int> parent(static_cast<size_t>(vertices));
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    };
    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= vertices || b < 0 || b >= vertices)
            throw input_error("kirchhoff_count: edge endpoint out of range");
        parent[static_cast<size_t>(root(a))] = root(b);
    }
    std::uint64_t product = 1;
    std::vector<int> comp_of(static_cast<size_t>(vertices), -1);
    for (int c = 0; c < vertices; ++c) {
        if (root(c) != c) continue;
        std::vector<int> members;
        for (int v = 0; v < vertices; ++v)
            if (root(v) == c) {
                comp_of[static_cast<size_t>(v)] = static_cast<int>(members.size());
                members.push_back(v);
            }
        int sz = static_cast<int>(members.size());
        if (sz == 1) continue;
        std::vector<std::vector<std::int64_t>> lap(static_cast<size_t>(sz) - 1,
                                                   std::vector<std::int64_t>(static_cast<size_t>(sz) - 1, 0));
        for (const auto& [a, b] : edges) {
            if (root(a) != c || a == b) continue;
            int ia = comp_of[static_cast<size_t>(a)], ib = comp_of[static_cast<size_t>(b)];
            if (ia < sz - 1) ++lap[static_cast<size_t>(ia)][static_cast<size_t>(ia)];
            if (ib < sz - 1) ++lap[static_cast<size_t>(ib)][static_cast<size_t>(ib)];
            if (ia < sz - 1 && ib < sz - 1) {
                --lap[static_cast<size_t>(ia)][static_cast<size_t>(ib)];
                --lap[static_cast<size_t>(ib)][static_cast<size_t>(ia)];
            }
        }
        std::int64_t det = bareiss_det(std::move(lap));
        if (det < 0) throw numeric_error("kirchhoff_count: negative determinant, Laplacian was malformed");
        product *= static_cast<std::uint64_t>(det);
    }
    return product;
}

namespace {

// down-up chain on the bases of M with uniform weights, as a dense matrix
WalkMatrix materialized_bases_chain(const Matroid& m) {
    HomogeneousDistribution mu = HomogeneousDistribution::make_uniform_bases(m);
    ExplicitPolynomial p = materialize(mu, static_cast<size_t>(dense_face_cap()));
    WeightedComplex x = build_complex(p);
    return lower_walk(x, x.d);
}

}  // namespace

CheckReport transition_bound_check(const Matroid& m) {
    CheckReport rep;
    rep.property = "exchange_transition_upper_bound";
    rep.tolerance = 1e-12;
    int r = m.rank();
    if (r == 0 || enumerate_bases(m).size() == 1) {
        rep.pass = true;
        rep.worst_value = 0.0;
        rep.detail = "no off-diagonal transitions, vacuous";
        return rep;
    }
    WalkMatrix w = materialized_bases_chain(m);
    double bound = 1.0 / (2.0 * r);
    int mm = static_cast<int>(w.faces.size());
    rep.worst_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j) {
            if (i == j) continue;
            if (w.p(i, j) > rep.worst_value) {
                rep.worst_value = w.p(i, j);
                rep.worst_face = w.faces[static_cast<size_t>(i)];
                rep.has_worst_face = true;
            }
        }
    rep.pass = rep.worst_value <= bound + 1e-12;
    rep.detail = "max off-diagonal " + std::to_string(rep.worst_value) + " vs bound 1/(2r) = " +
                 std::to_string(bound);
    return rep;
}

CheckReport conductance_vs_cheeger(const Matroid& m) {
    CheckReport rep;
    rep.property = "conductance_cheeger_sandwich";
    rep.tolerance = 1e-9;
    int r = m.rank();
    std::vector<Subset> bases = enumerate_bases(m);
    int nb = static_cast<int>(bases.size());
    if (nb == 1) {
        rep.pass = true;
        rep.detail = "single basis, no cut, vacuous";
        return rep;
    }
    if (nb > 20) throw resource_error("conductance_vs_cheeger: " + std::to_string(nb) + " bases exceed the 2^20 budget");
    WalkMatrix w = materialized_bases_chain(m);
    Spectrum sp = spectrum(w);
    double lambda2 = sp.eigenvalues[1];

    // incremental crossing weight over Gray-code subsets, uniform degrees
    std::vector<double> dot(static_cast<size_t>(nb), 0.0);  // dot[v] = sum_{i in S} P(v, i)
    double cut = 0.0;
    std::uint32_t s = 0;
    int size = 0;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;
    std::uint64_t total = std::uint64_t(1) << nb;
    for (std::uint64_t i = 1; i < total; ++i) {
        std::uint32_t gray = static_cast<std::uint32_t>(i ^ (i >> 1));
        int v = std::countr_zero(gray ^ s);
        double rowoff = 1.0 - w.p(v, v);
        if (gray & (std::uint32_t(1) << v)) {
            cut += rowoff - 2.0 * dot[static_cast<size_t>(v)];
            ++size;
            for (int u = 0; u < nb; ++u) dot[static_cast<size_t>(u)] += w.p(u, v);
        } else {
            for (int u = 0; u < nb; ++u) dot[static_cast<size_t>(u)] -= w.p(u, v);
            cut -= rowoff - 2.0 * dot[static_cast<size_t>(v)];
            --size;
        }
        s = gray;
        if (size >= 1 && 2 * size <= nb) {
            double c = cut / size;
            if (c < best) {
                best = c;
                best_mask = gray;
            }
        }
    }
    // drift guard: recompute the winning cut directly
    double direct = 0.0;
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b)
            if (((best_mask >> a) & 1) && !((best_mask >> b) & 1)) direct += w.p(a, b);
    best = direct / std::popcount(best_mask);

    double lower = (1.0 - lambda2) / 2.0;
    double upper = std::sqrt(2.0 * (1.0 - lambda2));
    double fact_bound = 1.0 / (2.0 * r);
    bool ok = best >= lower - 1e-9 && best <= upper + 1e-9 && best >= fact_bound - 1e-9;
    rep.pass = ok;
    rep.worst_value = best;
    rep.detail = "cond " + std::to_string(best) + " in [" + std::to_string(lower) + ", " +
                 std::to_string(upper) + "], 1/(2r) = " + std::to_string(fact_bound);
    return rep;
}

}  // namespace matwalk
