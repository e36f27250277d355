#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "matwalk/certify.hpp"
#include "matwalk/distribution.hpp"
#include "matwalk/matroid.hpp"
#include "matwalk/subset.hpp"

namespace matwalk {

// brute-force ground truth; every function enumerates within an explicit
// budget and raises resource_error beyond it

// all bases in lexicographic order; budget C(n, r) <= 10^6
std::vector<Subset> enumerate_bases(const Matroid& m);

// log of the size-d layer sum of mu's weights; budget C(n, d) <= 10^6
double exact_partition_log(const HomogeneousDistribution& mu);

// log Z_M(p, q) = log sum over all subsets of q^(r+1-rank(S)) p^|S|;
// budget 2^n <= 2^24
double exact_cluster_z_log(const Matroid& m, double p, double q);

// probability that the retained elements span when each element fails
// independently with probability p; budget 2^n <= 2^24
double exact_reliability(const Matroid& m, double p);

// log sum over size-k subsets of det(L_S)^alpha; budget C(n, k) <= 10^6
double exact_dpp_partition_log(const Eigen::MatrixXd& l, int k, double alpha);

struct BasesExchangeGraph {
    std::vector<Subset> bases;          // lex order
    std::vector<std::uint32_t> adj;     // neighbor bitmask per vertex (needs <= 32 vertices)
    std::vector<std::vector<int>> neighbors;
    std::int64_t edge_count = 0;
};

// vertices = bases, edges between bases with symmetric difference of size 2
BasesExchangeGraph bases_exchange_graph(const Matroid& m);

// min over nonempty S with |S| <= |V|/2 of crossing edges over |S|;
// +infinity for a single vertex; budget |V| <= 22
double exact_expansion(const BasesExchangeGraph& g);

// spanning-forest count via reduced-Laplacian determinants per component,
// exact integer arithmetic
std::uint64_t kirchhoff_count(int vertices, const std::vector<std::pair<int, int>>& edges);

// every off-diagonal entry of the uniform-bases exchange chain is <= 1/(2r)
CheckReport transition_bound_check(const Matroid& m);

// exact conductance of the weighted chain graph sits inside the two-sided
// Cheeger sandwich and is at least 1/(2r)
CheckReport conductance_vs_cheeger(const Matroid& m);

}  // namespace matwalk
