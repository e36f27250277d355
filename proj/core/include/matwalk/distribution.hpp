#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "matwalk/log_weight.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

// d-homogeneous multiaffine polynomial with positive coefficients.
// stored in log space: true coefficient of S is exp(log_coefs[S] + log_scale),
// normalized so the largest log_coefs value is 0
struct ExplicitPolynomial {
    int n = 0;
    int d = 0;
    double log_scale = 0.0;
    std::map<std::uint64_t, double> log_coefs;

    bool has_term(Subset s) const { return log_coefs.count(s.mask()) > 0; }
    LogWeight log_coef(Subset s) const {
        auto it = log_coefs.find(s.mask());
        return it == log_coefs.end() ? log_zero() : it->second;
    }
    // log p(1) including the scale
    double log_evaluate_at_one() const;
    size_t term_count() const { return log_coefs.size(); }

    // from linear-space coefficients; zero entries dropped, negatives rejected
    static ExplicitPolynomial from_terms(int n, int d, const std::vector<std::pair<Subset, double>>& terms);
    static ExplicitPolynomial from_log_terms(int n, int d, const std::vector<std::pair<Subset, double>>& log_terms);
};

// partial derivative by every variable of tau, restricted to surviving terms
ExplicitPolynomial derivative_link(const ExplicitPolynomial& p, Subset tau);

// coefficient-wise power c -> c^alpha, alpha in [0, 1]
ExplicitPolynomial alpha_power(const ExplicitPolynomial& p, double alpha);

// A d-homogeneous distribution presented by weight and local-extension oracles.
// Handles are value types; a single handle is not safe for concurrent use
// (memo caches and oracle counters are per-handle), use clone_for_worker()
class HomogeneousDistribution {
public:
    enum class Kind { uniform_bases, cluster_layer, dpp_alpha, explicit_terms };

    Kind kind() const { return kind_; }
    int ground_size() const { return n_; }
    int degree() const { return d_; }

    const Matroid& matroid() const;
    double cluster_q() const { return q_; }
    double dpp_alpha_value() const { return alpha_; }
    const Eigen::MatrixXd& kernel() const { return kernel_; }
    const std::vector<double>& log_lambda() const { return log_lambda_; }
    const ExplicitPolynomial& polynomial() const;

    // log weight of a size-d subset; log_zero off the support
    LogWeight log_weight(Subset s) const;

    // all j with t + {j} in the support, with log weights; pre: |t| = d-1
    // sorted by element index; empty result means t is outside the complex
    std::vector<std::pair<int, LogWeight>> extension_candidates(Subset t) const;

    // false only when no support set contains t; used to prune enumeration
    bool support_may_extend(Subset t) const;

    // deterministic start state in the support (greedy basis / weighted greedy)
    Subset canonical_start() const;

    // computable upper bound on max_S log weight, for mixing-bound surrogates
    double log_weight_upper() const;

    // valid surrogate for -log mu(start) when the partition sum is unknown
    double surrogate_neg_log_mu(Subset start) const;

    std::uint64_t oracle_calls() const;
    HomogeneousDistribution clone_for_worker() const;

    static HomogeneousDistribution make_uniform_bases(Matroid m, std::optional<std::vector<double>> lambda = {});
    static HomogeneousDistribution make_cluster_layer(Matroid m, int k, double q,
                                                      std::optional<std::vector<double>> lambda = {});
    static HomogeneousDistribution make_dpp_alpha(Eigen::MatrixXd kernel, int k, double alpha);
    static HomogeneousDistribution make_explicit(ExplicitPolynomial poly);

private:
    HomogeneousDistribution() = default;

    double dpp_pivot_tol() const;
    LogWeight dpp_log_det(Subset s) const;
    double cluster_log_weight_of(std::uint64_t mask) const;
    void build_explicit_index() const;

    Kind kind_ = Kind::explicit_terms;
    int n_ = 0, d_ = 0;
    Matroid matroid_;
    bool has_matroid_ = false;
    std::vector<double> log_lambda_;
    double q_ = 1.0;
    double alpha_ = 1.0;
    Eigen::MatrixXd kernel_;
    std::shared_ptr<const ExplicitPolynomial> poly_;

    mutable std::unordered_map<std::uint64_t, double> weight_cache_;
    mutable std::unordered_map<std::uint64_t, std::vector<std::pair<int, LogWeight>>> explicit_index_;
    mutable bool explicit_index_built_ = false;
};

// exhaustive support walk; throws resource_error if the support exceeds cap
ExplicitPolynomial materialize(const HomogeneousDistribution& mu, size_t cap);

// JSON schema, "type" selects the family:
//   {"type":"uniform_bases","matroid":<spec>,"lambda":[..]?}
//   {"type":"cluster_layer","matroid":<spec>,"k":K,"q":Q,"lambda":[..]?}
//   {"type":"dpp_alpha","kernel":[[..],..],"k":K,"alpha":A}
//   {"type":"explicit","n":N,"d":D,"terms":[{"set":[..],"coef":C},..]}
HomogeneousDistribution parse_distribution(std::string_view json_text);

}  // namespace matwalk
