#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/exact.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/matroid_parse.hpp"

using namespace matwalk;

namespace {

Subset sub(std::initializer_list<int> e) { return Subset::from_indices(std::vector<int>(e)); }

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("uniform bases weights") {
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    CHECK(mu.ground_size() == 4);
    CHECK(mu.degree() == 2);
    CHECK(mu.log_weight(sub({0, 1})) == doctest::Approx(0.0));
    CHECK(is_log_zero(mu.log_weight(sub({0}))));
    auto cands = mu.extension_candidates(sub({0}));
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].first == 1);
    CHECK(cands[1].first == 2);
    CHECK(cands[2].first == 3);
    CHECK(exact_partition_log(mu) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("uniform bases skips dependent extensions") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    // {0, 1} extends to any edge except the triangle closer 3
    auto cands = mu.extension_candidates(sub({0, 1}));
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].first == 2);
    CHECK(cands[1].first == 4);
    CHECK(cands[2].first == 5);
}

TEST_CASE("external field reweights bases") {
    std::vector<double> lambda{2.0, 1.0, 1.0, 1.0};
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2), lambda);
    CHECK(mu.log_weight(sub({0, 1})) == doctest::Approx(std::log(2.0)));
    CHECK(mu.log_weight(sub({2, 3})) == doctest::Approx(0.0));
}

TEST_CASE("cluster layer weight is q to the minus rank") {
    auto mu = HomogeneousDistribution::make_cluster_layer(k4(), 2, 0.5);
    CHECK(mu.degree() == 2);
    // independent pair: rank 2
    CHECK(mu.log_weight(sub({0, 5})) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    // every 2-subset of K4 edges is acyclic, so all weights match
    CHECK(mu.log_weight(sub({0, 1})) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    // rank-deficient sets appear at layer 3
    auto mu3 = HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.5);
    CHECK(mu3.log_weight(sub({0, 1, 3})) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(mu3.log_weight(sub({0, 1, 2})) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("dpp alpha weight is alpha log det") {
    Eigen::MatrixXd l = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0).asDiagonal();
    auto mu = HomogeneousDistribution::make_dpp_alpha(l, 2, 0.5);
    CHECK(mu.log_weight(sub({1, 2})) == doctest::Approx(0.5 * std::log(6.0)).epsilon(1e-12));
    CHECK(mu.log_weight(sub({0, 3})) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-12));

    auto mu0 = HomogeneousDistribution::make_dpp_alpha(l, 2, 0.0);
    CHECK(mu0.log_weight(sub({1, 2})) == doctest::Approx(0.0));
}

TEST_CASE("explicit distribution round trips") {
    auto p = ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1}), 2.0}, {sub({2, 3}), 1.0}});
    auto mu = HomogeneousDistribution::make_explicit(p);
    CHECK(mu.log_weight(sub({0, 1})) == doctest::Approx(std::log(2.0)));
    CHECK(is_log_zero(mu.log_weight(sub({0, 2}))));
    auto cands = mu.extension_candidates(sub({2}));
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].first == 3);
    CHECK_FALSE(mu.support_may_extend(sub({0, 2})));
    CHECK(mu.support_may_extend(sub({0})));
}

TEST_CASE("materialize agrees with log_weight") {
    auto mu = HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.25);
    auto p = materialize(mu, 1 << 16);
    CHECK(p.term_count() == 20);
    for (const auto& [mask, lc] : p.log_coefs)
        CHECK(lc + p.log_scale == doctest::Approx(mu.log_weight(Subset(mask))).epsilon(1e-12));
}

TEST_CASE("canonical start lies in the support with top weight reachable") {
    auto mus = {HomogeneousDistribution::make_uniform_bases(k4()),
                HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.5),
                HomogeneousDistribution::make_explicit(
                    ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1}), 1.0}, {sub({1, 2}), 3.0}}))};
    for (const auto& mu : mus) {
        Subset s = mu.canonical_start();
        CHECK(s.size() == mu.degree());
        CHECK_FALSE(is_log_zero(mu.log_weight(s)));
        CHECK(mu.log_weight(s) <= mu.log_weight_upper() + 1e-12);
    }
}

TEST_CASE("surrogate bounds the true negative log probability") {
    auto check_surrogate = [](const HomogeneousDistribution& mu) {
        Subset s = mu.canonical_start();
        double true_neg_log = exact_partition_log(mu) - mu.log_weight(s);
        CHECK(mu.surrogate_neg_log_mu(s) >= true_neg_log - 1e-9);
    };
    check_surrogate(HomogeneousDistribution::make_uniform_bases(k4()));
    check_surrogate(HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.25));
    check_surrogate(HomogeneousDistribution::make_cluster_layer(uniform_matroid(6, 3), 3, 0.5));
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(5, 5);
    l(0, 1) = l(1, 0) = 0.3;
    check_surrogate(HomogeneousDistribution::make_dpp_alpha(l, 2, 0.75));
}

TEST_CASE("worker clones have isolated counters") {
    auto mu = HomogeneousDistribution::make_uniform_bases(k4());
    mu.extension_candidates(sub({0, 1}));
    std::uint64_t calls = mu.oracle_calls();
    CHECK(calls > 0);
    auto clone = mu.clone_for_worker();
    clone.extension_candidates(sub({0, 2}));
    CHECK(mu.oracle_calls() == calls);
    CHECK(clone.oracle_calls() > 0);
}

TEST_CASE("distribution parsing") {
    auto mu = parse_distribution(
        R"({"type":"uniform_bases","matroid":{"type":"uniform","n":4,"r":2}})");
    CHECK(mu.kind() == HomogeneousDistribution::Kind::uniform_bases);
    CHECK(mu.degree() == 2);

    auto mc = parse_distribution(
        R"({"type":"cluster_layer","matroid":{"type":"uniform","n":4,"r":2},"k":3,"q":0.5})");
    CHECK(mc.kind() == HomogeneousDistribution::Kind::cluster_layer);
    CHECK(mc.degree() == 3);
    CHECK(mc.cluster_q() == doctest::Approx(0.5));

    auto md = parse_distribution(
        R"({"type":"dpp_alpha","kernel":[[2,0.5],[0.5,2]],"k":1,"alpha":0.5})");
    CHECK(md.kind() == HomogeneousDistribution::Kind::dpp_alpha);

    auto me = parse_distribution(
        R"({"type":"explicit","n":4,"d":2,"terms":[{"set":[0,1],"coef":1.0},{"set":[1,2],"coef":2.0}]})");
    CHECK(me.kind() == HomogeneousDistribution::Kind::explicit_terms);
    CHECK(me.log_weight(sub({1, 2})) == doctest::Approx(std::log(2.0)));

    CHECK_THROWS_AS(parse_distribution(R"({"type":"nope"})"), input_error);
    CHECK_THROWS_AS(
        parse_distribution(R"({"type":"cluster_layer","matroid":{"type":"uniform","n":4,"r":2},"k":3,"q":0})"),
        input_error);
    CHECK_THROWS_AS(
        parse_distribution(R"({"type":"dpp_alpha","kernel":[[1,0],[0,1],[0,0]],"k":1,"alpha":0.5})"),
        input_error);
    CHECK_THROWS_AS(
        parse_distribution(R"({"type":"dpp_alpha","kernel":[[1,0],[0,1]],"k":1,"alpha":2})"),
        input_error);
    CHECK_THROWS_AS(
        parse_distribution(R"({"type":"explicit","n":4,"d":2,"terms":[{"set":[0,1],"coef":-1}]})"),
        input_error);
}

TEST_CASE("explicit polynomial rejects bad terms") {
    CHECK_THROWS_AS(ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1}), -1.0}}), input_error);
    CHECK_THROWS_AS(ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1, 2}), 1.0}}), input_error);
    auto p = ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1}), 1.0}, {sub({2, 3}), 0.0}});
    CHECK(p.term_count() == 1);
}
