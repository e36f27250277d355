#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "matwalk/counting.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/exact.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/matroid_parse.hpp"

using namespace matwalk;

namespace {

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

Matroid fano() {
    return parse_matroid(
        R"({"type":"linear","field":2,"matrix":[[1,0,0,1,1,0,1],[0,1,0,1,0,1,1],[0,0,1,0,1,1,1]]})");
}

const MarginalFn kExact = [](const HomogeneousDistribution& mu) { return exact_marginals(mu); };

}  // namespace

TEST_CASE("exact marginals") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    auto m = exact_marginals(mu);
    REQUIRE(m.size() == 4);
    double total = 0.0;
    for (double v : m) {
        CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
        total += v;
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-12));

    auto mk = exact_marginals(HomogeneousDistribution::make_uniform_bases(k4()));
    double sum = 0.0;
    for (double v : mk) sum += v;
    CHECK(sum == doctest::Approx(3.0).epsilon(1e-12));
    // every K4 edge sits in 8 of the 16 spanning trees
    for (double v : mk) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sampled marginal estimate is close") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    SamplerConfig cfg{77, 0.01, -1, 0};
    double est = estimate_marginal(mu, 0, 4000, cfg);
    CHECK(std::abs(est - 0.5) < 0.05);
}

TEST_CASE("telescoping with exact marginals reproduces exact counts") {
    CHECK(count_bases(uniform_matroid(4, 2), 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(6.0).epsilon(1e-9));
    CHECK(count_bases(k4(), 0.1, 0.05, 1, 1, kExact).estimate == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(count_bases(fano(), 0.1, 0.05, 1, 1, kExact).estimate == doctest::Approx(28.0).epsilon(1e-9));
    CHECK(count_bases(uniform_matroid(6, 3).dual(), 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("count_bases base cases need no sampling") {
    auto rep0 = count_bases(uniform_matroid(3, 0), 0.1, 0.05, 1);
    CHECK(rep0.estimate == doctest::Approx(1.0));
    CHECK(rep0.samples_used == 0);
    auto rep1 = count_bases(uniform_matroid(5, 1), 0.1, 0.05, 1);
    CHECK(rep1.estimate == doctest::Approx(5.0));
    CHECK(rep1.samples_used == 0);
    auto repn = count_bases(uniform_matroid(4, 4), 0.1, 0.05, 1);
    CHECK(repn.estimate == doctest::Approx(1.0));
    CHECK(repn.samples_used == 0);
}

TEST_CASE("independent set counts by size") {
    CHECK(count_independent_sets(k4(), 0, 0.1, 0.05, 1, 1, kExact).estimate == doctest::Approx(1.0));
    CHECK(count_independent_sets(k4(), 1, 0.1, 0.05, 1, 1, kExact).estimate == doctest::Approx(6.0));
    CHECK(count_independent_sets(k4(), 2, 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(15.0).epsilon(1e-9));
    CHECK(count_independent_sets(k4(), 3, 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(16.0).epsilon(1e-9));
    CHECK_THROWS_AS(count_independent_sets(k4(), 4, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(count_independent_sets(k4(), -1, 0.1, 0.05, 1), input_error);
}

TEST_CASE("cluster partition telescopes to the exhaustive sum") {
    double got = cluster_partition(k4(), 1.0, 0.5, 0.1, 0.05, 1, 1, kExact).log_estimate;
    CHECK(got == doctest::Approx(exact_cluster_z_log(k4(), 1.0, 0.5)).epsilon(1e-9));
    double g2 = cluster_partition(uniform_matroid(4, 2), 0.7, 0.25, 0.1, 0.05, 1, 1, kExact).log_estimate;
    CHECK(g2 == doctest::Approx(exact_cluster_z_log(uniform_matroid(4, 2), 0.7, 0.25)).epsilon(1e-9));
    // q = 1 collapses to (1 + p)^n; eps small enough that no tail term is dropped
    double g3 = cluster_partition(k4(), 0.3, 1.0, 1e-3, 0.05, 1, 1, kExact).log_estimate;
    CHECK(g3 == doctest::Approx(6.0 * std::log1p(0.3)).epsilon(1e-9));
    // at looser eps the small high-k terms may be dropped, costing at most eps/2
    double g4 = cluster_partition(k4(), 0.3, 1.0, 0.1, 0.05, 1, 1, kExact).log_estimate;
    CHECK(std::abs(std::expm1(g4 - 6.0 * std::log1p(0.3))) < 0.05);
}

TEST_CASE("cluster partition handles loops") {
    // element 0 is a self-loop; at q = 1 the marginals tie and the loop
    // wins the pivot, exercising the delete branch of the recursion
    Matroid looped = graphic_matroid(3, {{0, 0}, {0, 1}, {1, 2}});
    REQUIRE(looped.rank() == 2);
    REQUIRE_FALSE(looped.is_independent(Subset{}.with(0)));
    for (double q : {1.0, 0.5}) {
        double got = cluster_partition(looped, 1.0, q, 0.1, 0.05, 1, 1, kExact).log_estimate;
        CHECK(got == doctest::Approx(exact_cluster_z_log(looped, 1.0, q)).epsilon(1e-9));
    }

    // contracting one triangle edge leaves two parallel elements
    Matroid tri = graphic_matroid(3, {{0, 1}, {0, 2}, {1, 2}});
    Matroid parallel = tri.contract(Subset{}.with(0));
    REQUIRE(parallel.rank() == 1);
    double got = cluster_partition(parallel, 1.0, 0.5, 0.1, 0.05, 1, 1, kExact).log_estimate;
    CHECK(got == doctest::Approx(exact_cluster_z_log(parallel, 1.0, 0.5)).epsilon(1e-9));
}

TEST_CASE("reliability matches brute force with exact marginals") {
    for (double p : {0.25, 0.5}) {
        double got = reliability(k4(), p, 0.1, 0.05, 1, 1, kExact).estimate;
        CHECK(got == doctest::Approx(exact_reliability(k4(), p)).epsilon(1e-9));
    }
    CHECK(reliability(k4(), 0.5, 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(38.0 / 64.0).epsilon(1e-9));
}

TEST_CASE("reliability endpoints") {
    auto rep0 = reliability(k4(), 0.0, 0.1, 0.05, 1);
    CHECK(rep0.estimate == doctest::Approx(1.0));
    auto rep1 = reliability(k4(), 1.0, 0.1, 0.05, 1);
    CHECK(rep1.estimate == doctest::Approx(0.0));
    CHECK(std::isinf(rep1.log_estimate));

    // two parallel elements of rank one survive unless both fail
    auto u12 = uniform_matroid(2, 1);
    for (double p : {0.3, 0.5, 0.9}) {
        auto rep = reliability(u12, p, 0.1, 0.05, 1);
        CHECK(rep.estimate == doctest::Approx(1.0 - p * p).epsilon(1e-12));
        CHECK(rep.samples_used == 0);
    }
}

TEST_CASE("tutte evaluations through the cluster map") {
    CHECK(tutte_eval(k4(), 2.0, 2.0, 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(64.0).epsilon(1e-9));
    CHECK(tutte_eval(uniform_matroid(4, 2), 2.0, 2.0, 0.1, 0.05, 1, 1, kExact).estimate ==
          doctest::Approx(16.0).epsilon(1e-9));
    CHECK_THROWS_AS(tutte_eval(k4(), 1.0, 2.0, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(tutte_eval(k4(), 2.0, 0.5, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(tutte_eval(k4(), 2.0, 1.0, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(tutte_eval(k4(), 4.0, 2.0, 0.1, 0.05, 1), input_error);
}

TEST_CASE("dpp partition telescopes to the exhaustive sum") {
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
    for (double alpha : {0.0, 0.5, 1.0})
        CHECK(dpp_partition(eye, 3, alpha, 0.1, 0.05, 1, 1, kExact).estimate ==
              doctest::Approx(20.0).epsilon(1e-9));

    Eigen::MatrixXd l(4, 4);
    l << 2.0, 0.5, 0.0, 0.0, 0.5, 2.0, 0.5, 0.0, 0.0, 0.5, 2.0, 0.5, 0.0, 0.0, 0.5, 2.0;
    for (double alpha : {0.5, 1.0}) {
        double got = dpp_partition(l, 2, alpha, 0.1, 0.05, 1, 1, kExact).log_estimate;
        CHECK(got == doctest::Approx(exact_dpp_partition_log(l, 2, alpha)).epsilon(1e-9));
    }
}

TEST_CASE("sampled estimators land inside the window on a fixed seed") {
    auto rep = count_bases(uniform_matroid(4, 2), 0.3, 0.2, 42);
    CHECK(rep.estimate > 6.0 * 0.7);
    CHECK(rep.estimate < 6.0 * 1.3);
    CHECK(rep.samples_used > 0);
    CHECK(rep.oracle_calls > 0);
    CHECK(rep.seed == 42);
}

TEST_CASE("schedule honors the accuracy split") {
    auto rep = count_bases(k4(), 0.2, 0.1, 7);
    const AccuracySchedule& s = rep.schedule;
    REQUIRE(s.levels > 0);
    CHECK(static_cast<double>(s.levels) * std::log1p(s.per_level_eps) <= std::log1p(0.2) + 1e-12);
    CHECK(static_cast<double>(s.levels) * s.per_level_delta <= 0.1 + 1e-12);
    CHECK(s.samples_per_level > 0);

    std::int64_t from_levels = 0;
    for (const LevelRecord& l : rep.levels) {
        from_levels += l.samples;
        CHECK(l.marginal >= 0.0);
        CHECK(l.marginal <= 1.0);
        if (!l.exact) {
            CHECK(l.samples == s.samples_per_level);
            CHECK(l.element >= 0);
        }
    }
    CHECK(rep.samples_used == from_levels);
    CHECK(rep.levels.size() == 3);  // two sampled contractions plus the rank-one base case
}

TEST_CASE("multi-term reports expose per-term breakdowns") {
    auto rep = reliability(k4(), 0.5, 0.4, 0.2, 3);
    CHECK_FALSE(rep.terms.empty());
    double direct = log_zero();
    std::vector<double> logs;
    for (const TermRecord& t : rep.terms) {
        if (!t.dropped) logs.push_back(t.log_term);
        if (t.exact) CHECK(t.levels.empty());
    }
    direct = log_sum_exp(logs);
    CHECK(direct == doctest::Approx(rep.log_estimate).epsilon(1e-9));
}

TEST_CASE("estimates are bit-identical across reruns and worker counts") {
    auto a = count_bases(k4(), 0.3, 0.2, 11, 1);
    auto b = count_bases(k4(), 0.3, 0.2, 11, 1);
    auto c = count_bases(k4(), 0.3, 0.2, 11, 2);
    CHECK(a.estimate == b.estimate);
    CHECK(a.estimate == c.estimate);
    CHECK(a.samples_used == c.samples_used);

    auto ra = reliability(k4(), 0.5, 0.4, 0.2, 5, 1).estimate;
    auto rb = reliability(k4(), 0.5, 0.4, 0.2, 5, 2).estimate;
    CHECK(ra == rb);
}

TEST_CASE("estimator input validation") {
    CHECK_THROWS_AS(count_bases(k4(), 0.0, 0.05, 1), input_error);
    CHECK_THROWS_AS(count_bases(k4(), 1.5, 0.05, 1), input_error);
    CHECK_THROWS_AS(count_bases(k4(), 0.1, 0.0, 1), input_error);
    CHECK_THROWS_AS(count_bases(k4(), 0.1, 1.0, 1), input_error);
    CHECK_THROWS_AS(reliability(k4(), -0.1, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(reliability(k4(), 1.1, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(cluster_partition(k4(), -1.0, 0.5, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(cluster_partition(k4(), 1.0, 0.0, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(cluster_partition(k4(), 1.0, 1.5, 0.1, 0.05, 1), input_error);
    CHECK_THROWS_AS(dpp_partition(Eigen::MatrixXd::Identity(3, 2), 1, 0.5, 0.1, 0.05, 1), input_error);
}
