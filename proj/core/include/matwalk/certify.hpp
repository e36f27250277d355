#pragma once

#include <string>

#include "matwalk/complex.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

// outcome of a numerical certification sweep; check failures land here,
// they are never thrown
struct CheckReport {
    std::string property;
    bool pass = true;
    bool has_worst_face = false;
    Subset worst_face;
    double worst_value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// second eigenvalue of every local walk at levels 0..d-2 is <= 1e-9
CheckReport check_zero_local_expander(const WeightedComplex& x);

// indecomposability (each derivative link has a connected weighted 1-skeleton)
// plus the quadratic test: every degree-2 restriction's Hessian has at most
// one eigenvalue above tolerance
CheckReport check_strong_log_concavity(const ExplicitPolynomial& p);

// for i = -1..k the upper k-walk has at most |X(i)| eigenvalues strictly
// above 1 - (i+1)/(k+1), with |X(-1)| = 0
CheckReport eigenvalue_count_check(const WeightedComplex& x, int k);

// symmetrized upper k-walk is dominated by k/(k+1) times the symmetrized
// lower k-walk plus 1/(k+1) times the identity, in the Loewner order
CheckReport loewner_domination_check(const WeightedComplex& x, int k);

}  // namespace matwalk
