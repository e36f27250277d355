#pragma once

#include <vector>

#include <Eigen/Dense>

#include "matwalk/complex.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

// dense row-stochastic walk on one level of a complex, reversible
// with respect to the stationary weights w
struct WalkMatrix {
    std::vector<Subset> faces;
    Eigen::MatrixXd p;
    std::vector<double> w;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // descending
    double residual = 0.0;            // max |S - S^T| after the D^(1/2) similarity
};

// exchange through level k+1: stay with 1/(k+1), else move mass
// w(union)/((k+1) w(row)); defined for 1 <= k < d
WalkMatrix upper_walk(const WeightedComplex& x, int k);

// drop one element then re-extend proportionally to weight; defined for
// 1 <= k <= d, and k = d is exactly the basis-exchange chain transition matrix
WalkMatrix lower_walk(const WeightedComplex& x, int k);

// non-lazy 1-skeleton walk of the link of tau: twice the upper 1-walk
// minus the identity; requires |tau| <= d-2
WalkMatrix local_walk(const WeightedComplex& x, Subset tau);

// rows i with d_i p_tau(1) > 0 of Hess(p_tau)(1) scaled by
// 1/((d-|tau|-1) d_i p_tau(1)); equals the local walk of tau entrywise
WalkMatrix normalized_hessian(const ExplicitPolynomial& p, Subset tau);

// eigenvalues of D^(1/2) P D^(-1/2); residual beyond 1e-9 raises numeric_error
// because it signals broken balance or reversibility
Spectrum spectrum(const WalkMatrix& walk);

}  // namespace matwalk
