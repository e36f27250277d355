#include "doctest.h"

#include <Eigen/Dense>

#include "matwalk/certify.hpp"
#include "matwalk/complex.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/walks.hpp"

using namespace matwalk;

namespace {

Subset sub(std::initializer_list<int> e) { return Subset::from_indices(std::vector<int>(e)); }

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("matroid families are certified as 0-local expanders") {
    const auto mus = {HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2)),
                      HomogeneousDistribution::make_uniform_bases(k4()),
                      HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.25)};
    for (const auto& mu : mus) {
        auto x = build_complex(materialize(mu, 1 << 16));
        CheckReport r = check_zero_local_expander(x);
        CHECK(r.pass);
        CHECK(r.worst_value <= r.tolerance);
    }
}

TEST_CASE("strong log-concavity holds for the basis generating polynomial") {
    auto p = materialize(HomogeneousDistribution::make_uniform_bases(k4()), 1 << 16);
    CheckReport r = check_strong_log_concavity(p);
    CHECK(r.pass);
}

TEST_CASE("decomposable polynomial is rejected") {
    auto p = ExplicitPolynomial::from_terms(4, 2, {{sub({0, 1}), 1.0}, {sub({2, 3}), 1.0}});
    CheckReport r = check_strong_log_concavity(p);
    CHECK_FALSE(r.pass);
    CHECK(r.has_worst_face);
    CHECK(r.worst_face == Subset{});
}

TEST_CASE("a disconnected derivative link fails below the top level") {
    // connected support, but the link of {2} splits into {0,1} and {3,4}
    auto p = ExplicitPolynomial::from_terms(5, 3, {{sub({0, 1, 2}), 1.0}, {sub({2, 3, 4}), 1.0}});
    CheckReport r = check_strong_log_concavity(p);
    CHECK_FALSE(r.pass);
    CHECK(r.has_worst_face);
    CHECK(r.worst_face == sub({2}));
}

TEST_CASE("eigenvalue counts against level sizes") {
    auto x = build_complex(materialize(HomogeneousDistribution::make_uniform_bases(k4()), 1 << 16));
    for (int k = 1; k < x.d; ++k) {
        CheckReport r = eigenvalue_count_check(x, k);
        CHECK(r.pass);
        CHECK(r.worst_value <= 0.0);
    }
    CHECK_THROWS_AS(eigenvalue_count_check(x, 0), state_error);
    CHECK_THROWS_AS(eigenvalue_count_check(x, x.d), state_error);
}

TEST_CASE("loewner domination between the walks") {
    auto x = build_complex(materialize(HomogeneousDistribution::make_uniform_bases(k4()), 1 << 16));
    for (int k = 1; k < x.d; ++k) CHECK(loewner_domination_check(x, k).pass);

    auto single = build_complex(
        ExplicitPolynomial::from_terms(3, 3, {{sub({0, 1, 2}), 1.0}}));
    for (int k = 1; k < single.d; ++k) {
        CheckReport r = loewner_domination_check(single, k);
        CHECK(r.pass);
        CHECK(std::abs(r.worst_value) <= r.tolerance);
    }
}

TEST_CASE("chain second eigenvalue stays under one minus one over d") {
    const auto mus = {HomogeneousDistribution::make_uniform_bases(k4()),
                      HomogeneousDistribution::make_cluster_layer(uniform_matroid(5, 2), 2, 0.5)};
    for (const auto& mu : mus) {
        auto x = build_complex(materialize(mu, 1 << 16));
        Spectrum s = spectrum(lower_walk(x, x.d));
        REQUIRE(s.eigenvalues.size() >= 2);
        CHECK(s.eigenvalues[1] <= 1.0 - 1.0 / x.d + 1e-9);
    }
}

TEST_CASE("alpha power interpolates toward the support indicator") {
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(4, 4);
    l(0, 1) = l(1, 0) = 0.5;
    for (double alpha : {0.0, 0.5, 1.0}) {
        auto mu = HomogeneousDistribution::make_dpp_alpha(l, 2, alpha);
        auto x = build_complex(materialize(mu, 1 << 16));
        CHECK(check_zero_local_expander(x).pass);
        CHECK(check_strong_log_concavity(materialize(mu, 1 << 16)).pass);
    }
}
