#include "matwalk/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "matwalk/errors.hpp"

namespace matwalk {

namespace {

// unblocked cholesky that reports pivots; returns false on a pivot <= tol
bool cholesky_pivots(const Eigen::MatrixXd& a, double tol, std::vector<double>& pivots) {
    int k = static_cast<int>(a.rows());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
    pivots.clear();
    for (int j = 0; j < k; ++j) {
        double s = a(j, j);
        for (int t = 0; t < j; ++t) s -= l(j, t) * l(j, t);
        if (!(s > tol)) return false;
        pivots.push_back(s);
        l(j, j) = std::sqrt(s);
        for (int i = j + 1; i < k; ++i) {
            double v = a(i, j);
            for (int t = 0; t < j; ++t) v -= l(i, t) * l(j, t);
            l(i, j) = v / l(j, j);
        }
    }
    return true;
}

std::vector<double> largest_k(const std::vector<double>& v, int k) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end(), std::greater<double>());
    s.resize(static_cast<size_t>(std::min<int>(k, static_cast<int>(s.size()))));
    return s;
}

}  // namespace

double ExplicitPolynomial::log_evaluate_at_one() const {
    std::vector<double> lws;
    lws.reserve(log_coefs.size());
    for (const auto& [m, lw] : log_coefs) lws.push_back(lw);
    return log_scale + log_sum_exp(lws);
}

ExplicitPolynomial ExplicitPolynomial::from_log_terms(int n, int d,
                                                      const std::vector<std::pair<Subset, double>>& log_terms) {
    if (n < 0 || n > 64) throw input_error("polynomial: n must be in [0, 64]");
    if (d < 0 || d > n) throw input_error("polynomial: degree must be in [0, n]");
    ExplicitPolynomial p;
    p.n = n;
    p.d = d;
    double m = log_zero();
    for (const auto& [s, lw] : log_terms) {
        if (s.size() != d) throw input_error("polynomial: term " + s.str() + " has size != degree " + std::to_string(d));
        if (!Subset::full(n).contains_all(s)) throw input_error("polynomial: term " + s.str() + " outside ground set");
        if (std::isnan(lw)) throw input_error("polynomial: NaN coefficient at " + s.str());
        if (is_log_zero(lw)) continue;
        if (p.log_coefs.count(s.mask())) throw input_error("polynomial: duplicate term " + s.str());
        p.log_coefs[s.mask()] = lw;
        if (lw > m) m = lw;
    }
    if (p.log_coefs.empty()) {
        p.log_scale = 0.0;
        return p;
    }
    p.log_scale = m;
    for (auto& [mask, lw] : p.log_coefs) lw -= m;
    return p;
}

ExplicitPolynomial ExplicitPolynomial::from_terms(int n, int d, const std::vector<std::pair<Subset, double>>& terms) {
    std::vector<std::pair<Subset, double>> logs;
    logs.reserve(terms.size());
    for (const auto& [s, c] : terms) {
        if (std::isnan(c) || c < 0.0) throw input_error("polynomial: coefficient at " + s.str() + " must be >= 0");
        if (c == 0.0) continue;
        logs.emplace_back(s, std::log(c));
    }
    return from_log_terms(n, d, logs);
}

ExplicitPolynomial derivative_link(const ExplicitPolynomial& p, Subset tau) {
    if (tau.size() > p.d) throw input_error("derivative_link: |tau| exceeds degree");
    ExplicitPolynomial out;
    out.n = p.n;
    out.d = p.d - tau.size();
    out.log_scale = p.log_scale;
    for (const auto& [mask, lw] : p.log_coefs)
        if ((mask & tau.mask()) == tau.mask()) out.log_coefs[mask & ~tau.mask()] = lw;
    return out;
}

ExplicitPolynomial alpha_power(const ExplicitPolynomial& p, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw input_error("alpha_power: alpha must be in [0, 1]");
    ExplicitPolynomial out = p;
    // scale and coefficients transform separately, so repeated powers compose exactly
    out.log_scale = alpha * p.log_scale;
    for (auto& [mask, lw] : out.log_coefs) lw = alpha * lw;
    return out;
}

const Matroid& HomogeneousDistribution::matroid() const {
    if (!has_matroid_) throw state_error("distribution has no matroid");
    return matroid_;
}

const ExplicitPolynomial& HomogeneousDistribution::polynomial() const {
    if (!poly_) throw state_error("distribution has no explicit polynomial");
    return *poly_;
}

double HomogeneousDistribution::dpp_pivot_tol() const {
    double tr = kernel_.trace();
    return 1e-10 * std::max(1.0, tr / std::max(1, n_));
}

LogWeight HomogeneousDistribution::dpp_log_det(Subset s) const {
    if (s.empty()) return 0.0;
    auto idx = s.indices();
    int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = kernel_(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    std::vector<double> pivots;
    if (!cholesky_pivots(sub, dpp_pivot_tol(), pivots)) return log_zero();
    double ld = 0.0;
    for (double pv : pivots) ld += std::log(pv);
    return ld;
}

double HomogeneousDistribution::cluster_log_weight_of(std::uint64_t mask) const {
    auto it = weight_cache_.find(mask);
    if (it != weight_cache_.end()) return it->second;
    Subset s(mask);
    double lw = -static_cast<double>(matroid_.rank_of(s)) * std::log(q_);
    for (int e : s.indices()) lw += log_lambda_[static_cast<size_t>(e)];
    weight_cache_.emplace(mask, lw);
    return lw;
}

LogWeight HomogeneousDistribution::log_weight(Subset s) const {
    if (s.size() != d_ || !Subset::full(n_).contains_all(s)) return log_zero();
    switch (kind_) {
        case Kind::uniform_bases: {
            if (!matroid_.is_independent(s)) return log_zero();
            double lw = 0.0;
            for (int e : s.indices()) lw += log_lambda_[static_cast<size_t>(e)];
            return lw;
        }
        case Kind::cluster_layer:
            return cluster_log_weight_of(s.mask());
        case Kind::dpp_alpha: {
            auto it = weight_cache_.find(s.mask());
            if (it != weight_cache_.end()) return it->second;
            LogWeight ld = dpp_log_det(s);
            LogWeight lw = is_log_zero(ld) ? log_zero() : alpha_ * ld;
            weight_cache_.emplace(s.mask(), lw);
            return lw;
        }
        case Kind::explicit_terms: {
            LogWeight lc = poly_->log_coef(s);
            return is_log_zero(lc) ? lc : lc + poly_->log_scale;
        }
    }
    return log_zero();
}

bool HomogeneousDistribution::support_may_extend(Subset t) const {
    if (t.size() > d_ || !Subset::full(n_).contains_all(t)) return false;
    switch (kind_) {
        case Kind::uniform_bases:
            return matroid_.is_independent(t);
        case Kind::cluster_layer:
            return true;
        case Kind::dpp_alpha:
            return !is_log_zero(dpp_log_det(t));
        case Kind::explicit_terms:
            for (const auto& [mask, lw] : poly_->log_coefs)
                if ((mask & t.mask()) == t.mask()) return true;
            return false;
    }
    return true;
}

void HomogeneousDistribution::build_explicit_index() const {
    if (explicit_index_built_) return;
    for (const auto& [mask, lc] : poly_->log_coefs) {
        Subset s(mask);
        for (int e : s.indices())
            explicit_index_[s.without(e).mask()].emplace_back(e, lc + poly_->log_scale);
    }
    for (auto& [mask, lst] : explicit_index_) std::sort(lst.begin(), lst.end());
    explicit_index_built_ = true;
}

std::vector<std::pair<int, LogWeight>> HomogeneousDistribution::extension_candidates(Subset t) const {
    if (t.size() != d_ - 1 || !Subset::full(n_).contains_all(t))
        throw state_error("extension_candidates: expected a size-" + std::to_string(d_ - 1) + " subset, got " + t.str());
    std::vector<std::pair<int, LogWeight>> out;
    switch (kind_) {
        case Kind::uniform_bases: {
            for (int j = 0; j < n_; ++j) {
                if (t.contains(j)) continue;
                Subset s = t.with(j);
                if (!matroid_.is_independent(s)) continue;
                double lw = 0.0;
                for (int e : s.indices()) lw += log_lambda_[static_cast<size_t>(e)];
                out.emplace_back(j, lw);
            }
            break;
        }
        case Kind::cluster_layer: {
            for (int j = 0; j < n_; ++j) {
                if (t.contains(j)) continue;
                out.emplace_back(j, cluster_log_weight_of(t.with(j).mask()));
            }
            break;
        }
        case Kind::dpp_alpha: {
            auto idx = t.indices();
            int k = static_cast<int>(idx.size());
            Eigen::MatrixXd sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j2 = 0; j2 < k; ++j2)
                    sub(i, j2) = kernel_(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j2)]);
            std::vector<double> pivots;
            double tol = dpp_pivot_tol();
            if (!cholesky_pivots(sub, tol, pivots)) break;  // t itself degenerate: no candidates
            double base_ld = 0.0;
            for (double pv : pivots) base_ld += std::log(pv);
            Eigen::LLT<Eigen::MatrixXd> llt;
            if (k > 0) llt.compute(sub);
            for (int j = 0; j < n_; ++j) {
                if (t.contains(j)) continue;
                double pivot = kernel_(j, j);
                if (k > 0) {
                    Eigen::VectorXd col(k);
                    for (int i = 0; i < k; ++i) col(i) = kernel_(idx[static_cast<size_t>(i)], j);
                    Eigen::VectorXd y = llt.matrixL().solve(col);
                    pivot -= y.squaredNorm();
                }
                if (pivot > tol) out.emplace_back(j, alpha_ * (base_ld + std::log(pivot)));
            }
            break;
        }
        case Kind::explicit_terms: {
            build_explicit_index();
            auto it = explicit_index_.find(t.mask());
            if (it != explicit_index_.end()) out = it->second;
            break;
        }
    }
    return out;
}

Subset HomogeneousDistribution::canonical_start() const {
    switch (kind_) {
        case Kind::uniform_bases:
            return matroid_.greedy_basis();
        case Kind::cluster_layer:
        case Kind::dpp_alpha: {
            Subset t(0);
            for (int step = 0; step < d_; ++step) {
                int best = -1;
                double best_lw = log_zero();
                for (int j = 0; j < n_; ++j) {
                    if (t.contains(j)) continue;
                    LogWeight lw;
                    if (kind_ == Kind::cluster_layer) {
                        lw = cluster_log_weight_of(t.with(j).mask());
                    } else {
                        LogWeight ld = dpp_log_det(t.with(j));
                        lw = is_log_zero(ld) ? ld : alpha_ * ld;
                    }
                    if (best < 0 || lw > best_lw) {
                        best = j;
                        best_lw = lw;
                    }
                }
                if (best < 0 || is_log_zero(best_lw))
                    throw state_error("canonical_start: support appears empty at size " + std::to_string(step));
                t = t.with(best);
            }
            return t;
        }
        case Kind::explicit_terms: {
            const auto& coefs = poly_->log_coefs;
            if (coefs.empty()) throw state_error("canonical_start: empty support");
            std::uint64_t best_mask = 0;
            double best = log_zero();
            for (const auto& [mask, lw] : coefs)
                if (lw > best) {
                    best = lw;
                    best_mask = mask;
                }
            return Subset(best_mask);
        }
    }
    throw state_error("canonical_start: unreachable");
}

double HomogeneousDistribution::log_weight_upper() const {
    switch (kind_) {
        case Kind::uniform_bases: {
            double s = 0.0;
            for (double l : largest_k(log_lambda_, d_)) s += l;
            return s;
        }
        case Kind::cluster_layer: {
            double s = -static_cast<double>(std::min(d_, matroid_.rank())) * std::log(q_);
            for (double l : largest_k(log_lambda_, d_)) s += l;
            return s;
        }
        case Kind::dpp_alpha: {
            std::vector<double> diag_logs;
            double tol = dpp_pivot_tol();
            for (int i = 0; i < n_; ++i) diag_logs.push_back(std::log(std::max(kernel_(i, i), tol)));
            double s = 0.0;
            for (double l : largest_k(diag_logs, d_)) s += l;
            return alpha_ * s;
        }
        case Kind::explicit_terms:
            return poly_->log_scale;
    }
    return 0.0;
}

double HomogeneousDistribution::surrogate_neg_log_mu(Subset start) const {
    // the support has at most C(n, d) sets (term_count when explicit)
    double support_log = kind_ == Kind::explicit_terms
                             ? std::log(static_cast<double>(std::max<size_t>(1, poly_->term_count())))
                             : std::lgamma(n_ + 1.0) - std::lgamma(d_ + 1.0) - std::lgamma(n_ - d_ + 1.0);
    LogWeight lw = log_weight(start);
    if (is_log_zero(lw)) throw state_error("surrogate_neg_log_mu: start " + start.str() + " is outside the support");
    return support_log + std::max(0.0, log_weight_upper() - lw);
}

std::uint64_t HomogeneousDistribution::oracle_calls() const {
    return has_matroid_ ? matroid_.oracle_calls() : 0;
}

HomogeneousDistribution HomogeneousDistribution::clone_for_worker() const {
    HomogeneousDistribution c = *this;
    if (c.has_matroid_) c.matroid_ = c.matroid_.with_fresh_counter();
    c.weight_cache_.clear();
    return c;
}

namespace {
std::vector<double> check_lambda(std::optional<std::vector<double>> lambda, int n) {
    std::vector<double> ll(static_cast<size_t>(n), 0.0);
    if (lambda) {
        if (static_cast<int>(lambda->size()) != n)
            throw input_error("lambda must have one entry per ground element (" + std::to_string(n) + ")");
        for (int i = 0; i < n; ++i) {
            double v = (*lambda)[static_cast<size_t>(i)];
            if (!(v > 0.0) || !std::isfinite(v))
                throw input_error("lambda[" + std::to_string(i) + "] must be a positive finite number");
            ll[static_cast<size_t>(i)] = std::log(v);
        }
    }
    return ll;
}
}  // namespace

HomogeneousDistribution HomogeneousDistribution::make_uniform_bases(Matroid m, std::optional<std::vector<double>> lambda) {
    HomogeneousDistribution dist;
    dist.kind_ = Kind::uniform_bases;
    dist.n_ = m.size();
    dist.d_ = m.rank();
    dist.log_lambda_ = check_lambda(std::move(lambda), dist.n_);
    dist.matroid_ = std::move(m);
    dist.has_matroid_ = true;
    return dist;
}

HomogeneousDistribution HomogeneousDistribution::make_cluster_layer(Matroid m, int k, double q,
                                                                    std::optional<std::vector<double>> lambda) {
    if (!(q > 0.0 && q <= 1.0)) throw input_error("cluster_layer: q must be in (0, 1]");
    if (k < 0 || k > m.size()) throw input_error("cluster_layer: k must be in [0, n]");
    HomogeneousDistribution dist;
    dist.kind_ = Kind::cluster_layer;
    dist.n_ = m.size();
    dist.d_ = k;
    dist.q_ = q;
    dist.log_lambda_ = check_lambda(std::move(lambda), dist.n_);
    dist.matroid_ = std::move(m);
    dist.has_matroid_ = true;
    return dist;
}

HomogeneousDistribution HomogeneousDistribution::make_dpp_alpha(Eigen::MatrixXd kernel, int k, double alpha) {
    if (kernel.rows() != kernel.cols()) throw input_error("dpp_alpha: kernel must be square");
    int n = static_cast<int>(kernel.rows());
    if (n < 1 || n > 64) throw input_error("dpp_alpha: kernel size must be in [1, 64]");
    if (k < 0 || k > n) throw input_error("dpp_alpha: k must be in [0, n]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw input_error("dpp_alpha: alpha must be in [0, 1]");
    double scale = std::max(1.0, kernel.cwiseAbs().maxCoeff());
    if ((kernel - kernel.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw input_error("dpp_alpha: kernel must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (kernel + kernel.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw input_error("dpp_alpha: kernel must be positive semidefinite");
    HomogeneousDistribution dist;
    dist.kind_ = Kind::dpp_alpha;
    dist.n_ = n;
    dist.d_ = k;
    dist.alpha_ = alpha;
    dist.kernel_ = 0.5 * (kernel + kernel.transpose());
    try {
        dist.canonical_start();
    } catch (const state_error&) {
        throw input_error("dpp_alpha: no size-" + std::to_string(k) + " subset has positive determinant");
    }
    return dist;
}

HomogeneousDistribution HomogeneousDistribution::make_explicit(ExplicitPolynomial poly) {
    if (poly.log_coefs.empty()) throw input_error("explicit distribution: support must be nonempty");
    HomogeneousDistribution dist;
    dist.kind_ = Kind::explicit_terms;
    dist.n_ = poly.n;
    dist.d_ = poly.d;
    dist.poly_ = std::make_shared<const ExplicitPolynomial>(std::move(poly));
    return dist;
}

ExplicitPolynomial materialize(const HomogeneousDistribution& mu, size_t cap) {
    if (mu.kind() == HomogeneousDistribution::Kind::explicit_terms) {
        const ExplicitPolynomial& p = mu.polynomial();
        if (p.term_count() > cap)
            throw resource_error("materialize: support size " + std::to_string(p.term_count()) +
                                 " exceeds cap " + std::to_string(cap));
        return p;
    }
    int n = mu.ground_size(), d = mu.degree();
    std::vector<std::pair<Subset, double>> terms;
    struct Walker {
        const HomogeneousDistribution& mu;
        size_t cap;
        int n, d;
        std::vector<std::pair<Subset, double>>& terms;
        void visit(Subset t, int next) {
            if (t.size() == d) {
                LogWeight lw = mu.log_weight(t);
                if (!is_log_zero(lw)) {
                    if (terms.size() >= cap)
                        throw resource_error("materialize: support exceeds cap " + std::to_string(cap));
                    terms.emplace_back(t, lw);
                }
                return;
            }
            for (int j = next; j <= n - (d - t.size()); ++j) {
                Subset tj = t.with(j);
                if (mu.support_may_extend(tj)) visit(tj, j + 1);
            }
        }
    };
    Walker w{mu, cap, n, d, terms};
    w.visit(Subset(0), 0);
    return ExplicitPolynomial::from_log_terms(n, d, terms);
}

HomogeneousDistribution parse_distribution(std::string_view json_text) {
    using namespace detail;
    json j = parse_json_text(json_text);
    if (!j.is_object()) throw input_error("distribution spec must be an object");
    const json& tj = require_field(j, "type", "");
    if (!tj.is_string()) throw input_error("field /type must be a string");
    std::string type = tj.get<std::string>();

    auto opt_lambda = [&](int n) -> std::optional<std::vector<double>> {
        auto it = j.find("lambda");
        if (it == j.end()) return std::nullopt;
        if (!it->is_array()) throw input_error("field /lambda must be an array");
        std::vector<double> l;
        for (size_t i = 0; i < it->size(); ++i) {
            if (!(*it)[i].is_number()) throw input_error("field /lambda/" + std::to_string(i) + " must be a number");
            l.push_back((*it)[i].get<double>());
        }
        (void)n;
        return l;
    };

    if (type == "uniform_bases") {
        Matroid m = parse_matroid_json(require_field(j, "matroid", ""), "/matroid");
        return HomogeneousDistribution::make_uniform_bases(std::move(m), opt_lambda(0));
    }
    if (type == "cluster_layer") {
        Matroid m = parse_matroid_json(require_field(j, "matroid", ""), "/matroid");
        int k = require_int(j, "k", "");
        double q = require_number(j, "q", "");
        return HomogeneousDistribution::make_cluster_layer(std::move(m), k, q, opt_lambda(0));
    }
    if (type == "dpp_alpha") {
        const json& kj = require_field(j, "kernel", "");
        if (!kj.is_array() || kj.empty()) throw input_error("field /kernel must be a nonempty array of rows");
        size_t n = kj.size();
        Eigen::MatrixXd kern(n, n);
        for (size_t i = 0; i < n; ++i) {
            if (!kj[i].is_array() || kj[i].size() != n)
                throw input_error("field /kernel/" + std::to_string(i) + " must be a row of length " + std::to_string(n));
            for (size_t c = 0; c < n; ++c) {
                if (!kj[i][c].is_number())
                    throw input_error("field /kernel/" + std::to_string(i) + "/" + std::to_string(c) + " must be a number");
                kern(static_cast<int>(i), static_cast<int>(c)) = kj[i][c].get<double>();
            }
        }
        return HomogeneousDistribution::make_dpp_alpha(std::move(kern), require_int(j, "k", ""),
                                                       require_number(j, "alpha", ""));
    }
    if (type == "explicit") {
        int n = require_int(j, "n", "");
        int d = require_int(j, "d", "");
        const json& terms = require_field(j, "terms", "");
        if (!terms.is_array()) throw input_error("field /terms must be an array");
        std::vector<std::pair<Subset, double>> tv;
        for (size_t i = 0; i < terms.size(); ++i) {
            std::string path = "/terms/" + std::to_string(i);
            if (!terms[i].is_object()) throw input_error("field " + path + " must be an object");
            Subset s = require_subset(require_field(terms[i], "set", path), path + "/set");
            double c = require_number(terms[i], "coef", path);
            if (c < 0.0) throw input_error("field " + path + "/coef must be >= 0");
            tv.emplace_back(s, c);
        }
        return HomogeneousDistribution::make_explicit(ExplicitPolynomial::from_terms(n, d, tv));
    }
    throw input_error("unknown distribution type \"" + type + "\" at /type");
}

}  // namespace matwalk
