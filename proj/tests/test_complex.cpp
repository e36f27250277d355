#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "matwalk/complex.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/errors.hpp"
#include "matwalk/matroid.hpp"

using namespace matwalk;

namespace {

Subset sub(std::initializer_list<int> e) { return Subset::from_indices(std::vector<int>(e)); }

WeightedComplex complex_of(const HomogeneousDistribution& mu) {
    return build_complex(materialize(mu, 1 << 16));
}

Matroid k4() {
    return graphic_matroid(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("levels and weights of the uniform U(2,4) complex") {
    auto x = complex_of(HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2)));
    CHECK(x.d == 2);
    CHECK(x.level_size(0) == 1);
    CHECK(x.level_size(1) == 4);
    CHECK(x.level_size(2) == 6);
    // w(tau) = (d - |tau|)! times the number of bases containing tau
    CHECK(x.weight_of(sub({0, 1})) == doctest::Approx(1.0));
    CHECK(x.weight_of(sub({2})) == doctest::Approx(3.0));
    CHECK(x.weight_of(Subset{}) == doctest::Approx(12.0));
}

TEST_CASE("K4 empty-face weight is d! times the tree count") {
    auto x = complex_of(HomogeneousDistribution::make_uniform_bases(k4()));
    CHECK(x.d == 3);
    CHECK(x.level_size(3) == 16);
    CHECK(x.weight_of(Subset{}) == doctest::Approx(96.0));
    // triangle sets never appear as faces
    CHECK_FALSE(x.has_face(sub({0, 1, 3})));
    CHECK(x.has_face(sub({0, 1, 2})));
}

TEST_CASE("purity and the cover-sum identity") {
    auto check_complex = [](const WeightedComplex& x) {
        const auto& top = x.faces[static_cast<size_t>(x.d)];
        const auto& topw = x.weights[static_cast<size_t>(x.d)];
        for (int k = 0; k < x.d; ++k) {
            for (size_t i = 0; i < x.faces[static_cast<size_t>(k)].size(); ++i) {
                Subset tau = x.faces[static_cast<size_t>(k)][i];
                double w = x.weights[static_cast<size_t>(k)][i];
                bool extends = false;
                for (Subset sigma : top) extends = extends || sigma.contains_all(tau);
                CHECK(extends);
                double covers = 0.0;
                for (size_t j = 0; j < x.faces[static_cast<size_t>(k + 1)].size(); ++j)
                    if (x.faces[static_cast<size_t>(k + 1)][j].contains_all(tau))
                        covers += x.weights[static_cast<size_t>(k + 1)][j];
                CHECK(w == doctest::Approx(covers).epsilon(1e-12));
                double factorial = 1.0;
                for (int t = 2; t <= x.d - k; ++t) factorial *= t;
                double tops = 0.0;
                for (size_t j = 0; j < top.size(); ++j)
                    if (top[j].contains_all(tau)) tops += topw[j];
                CHECK(w == doctest::Approx(factorial * tops).epsilon(1e-12));
            }
        }
    };
    check_complex(complex_of(HomogeneousDistribution::make_uniform_bases(k4())));
    check_complex(complex_of(HomogeneousDistribution::make_cluster_layer(k4(), 3, 0.5)));
}

TEST_CASE("faces are sorted and indexed") {
    auto x = complex_of(HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2)));
    const auto& singles = x.faces[1];
    for (size_t i = 1; i < singles.size(); ++i) CHECK(singles[i - 1].mask() < singles[i].mask());
    CHECK(x.has_face(sub({1})));
    CHECK_FALSE(x.has_face(sub({0, 1, 2})));
    CHECK(x.weight_of(sub({3})) == doctest::Approx(3.0));
}

TEST_CASE("link restricts and reindexes") {
    auto x = complex_of(HomogeneousDistribution::make_uniform_bases(k4()));
    auto l = link(x, sub({0}));
    CHECK(l.d == 2);
    // faces of the link are the faces containing edge 0, with 0 removed
    CHECK(l.has_face(sub({1, 2})));
    CHECK(l.has_face(sub({3})));
    // edges 0, 1, 3 close a triangle, so {1, 3} is not in the link of {0}
    CHECK_FALSE(l.has_face(sub({1, 3})));
    CHECK(l.weight_of(Subset{}) == doctest::Approx(x.weight_of(sub({0}))));
    CHECK_THROWS_AS(link(x, sub({0, 1, 3})), input_error);
}

TEST_CASE("face cap respects the environment override") {
    setenv("MATROID_WALKS_CAP", "3", 1);
    auto mu = HomogeneousDistribution::make_uniform_bases(uniform_matroid(4, 2));
    CHECK_THROWS_AS(complex_of(mu), resource_error);
    setenv("MATROID_WALKS_CAP", "bogus", 1);
    CHECK_THROWS_AS(dense_face_cap(), input_error);
    unsetenv("MATROID_WALKS_CAP");
    CHECK(dense_face_cap() == 5000);
}
