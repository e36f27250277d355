#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "matwalk/distribution.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/sampler.hpp"

namespace matwalk {

// sampling plan for one telescoping product. each of `levels` sampled
// levels estimates one marginal with samples_per_level draws, so that
//   (1 + per_level_eps)^levels <= 1 + epsilon
//   levels * per_level_delta   <= delta
struct AccuracySchedule {
    int levels = 0;
    double per_level_eps = 0.0;
    double per_level_delta = 0.0;
    std::int64_t samples_per_level = 0;
};

// one telescoping step: either a sampled marginal or an exact base case
struct LevelRecord {
    std::string label;
    int element = -1;        // ground-set label of the pivot, -1 for exact steps
    double marginal = 0.0;   // estimated Pr[pivot in S]
    double log_factor = 0.0; // contribution to log_estimate
    std::int64_t samples = 0;
    std::int64_t steps = 0;  // chain steps per sample
    bool exact = false;
};

// one k-term of a positive sum (reliability / cluster layers)
struct TermRecord {
    int k = 0;
    double log_term = 0.0;     // log of the term including its coefficient
    bool dropped = false;      // crude bound showed the term negligible
    bool exact = false;
    double crude_upper = 0.0;  // the bound used by the drop rule
    AccuracySchedule schedule; // zeroed for exact or dropped terms
    std::vector<LevelRecord> levels;
};

struct EstimateReport {
    double estimate = 0.0;
    double log_estimate = 0.0;  // authoritative; estimate = exp(log_estimate)
    double epsilon = 0.0;
    double delta = 0.0;
    std::int64_t samples_used = 0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t seed = 0;
    // deepest telescope's schedule; multi-term runs carry one per term
    AccuracySchedule schedule;
    std::vector<LevelRecord> levels;  // single-telescope breakdown
    std::vector<TermRecord> terms;    // per-k breakdown, empty for count_bases
};

// replaces sampling with externally supplied per-element marginals;
// used to validate the telescoping recursions in isolation
using MarginalFn = std::function<std::vector<double>(const HomogeneousDistribution&)>;

// fraction of m samples containing the element; unbiased for Pr[element in S]
double estimate_marginal(const HomogeneousDistribution& mu, int element, std::int64_t m,
                         const SamplerConfig& cfg, int workers = 1);

// brute-force marginals by support enumeration (test oracle)
std::vector<double> exact_marginals(const HomogeneousDistribution& mu, std::size_t cap = 2000000);

// number of bases, by telescoping over contractions of the max-marginal
// element (ties to the lowest index)
EstimateReport count_bases(const Matroid& m, double epsilon, double delta, std::uint64_t seed,
                           int workers = 1, const MarginalFn& marginals = {});

// number of independent sets of size exactly k
EstimateReport count_independent_sets(const Matroid& m, int k, double epsilon, double delta,
                                      std::uint64_t seed, int workers = 1, const MarginalFn& marginals = {});

// Pr[random subset spans] when each element fails independently with
// probability p; positive sum over co-independent set counts
EstimateReport reliability(const Matroid& m, double p, double epsilon, double delta, std::uint64_t seed,
                           int workers = 1, const MarginalFn& marginals = {});

// random cluster partition function sum_S q^(r+1-rank(S)) p^|S|, 0 < q <= 1
EstimateReport cluster_partition(const Matroid& m, double p, double q, double epsilon, double delta,
                                 std::uint64_t seed, int workers = 1, const MarginalFn& marginals = {});

// Tutte polynomial at (x, y) with y > 1, x > 1, (x-1)(y-1) <= 1, via the
// random cluster change of variables
EstimateReport tutte_eval(const Matroid& m, double x, double y, double epsilon, double delta,
                          std::uint64_t seed, int workers = 1, const MarginalFn& marginals = {});

// sum of det(L_S)^alpha over size-k subsets, by Schur-complement conditioning
EstimateReport dpp_partition(const Eigen::MatrixXd& l, int k, double alpha, double epsilon, double delta,
                             std::uint64_t seed, int workers = 1, const MarginalFn& marginals = {});

}  // namespace matwalk
