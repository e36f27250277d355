#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "matwalk/distribution.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

// pure weighted simplicial complex; level k holds the size-k faces.
// weights are linear-space positives satisfying the balance recursion
// w(tau) = sum of w over the level-(k+1) faces containing tau
struct WeightedComplex {
    int n = 0;
    int d = 0;
    std::vector<std::vector<Subset>> faces;    // faces[k], lex-sorted, k = 0..d
    std::vector<std::vector<double>> weights;  // weights[k][i] = w(faces[k][i])
    std::vector<std::unordered_map<std::uint64_t, int>> index;  // mask -> slot in level

    int level_size(int k) const { return static_cast<int>(faces[static_cast<size_t>(k)].size()); }
    bool has_face(Subset t) const;
    double weight_of(Subset t) const;  // input_error when t is not a face
};

// largest allowed level size for dense construction; default 5000,
// override with the MATROID_WALKS_CAP environment variable
int dense_face_cap();

// all subsets of the support terms, with balanced weights computed top-down
// from the true coefficients of p
WeightedComplex build_complex(const ExplicitPolynomial& p);

// faces {sigma - tau : sigma in X, sigma contains tau}, weights inherited;
// element labels keep their original indices
WeightedComplex link(const WeightedComplex& x, Subset tau);

}  // namespace matwalk
