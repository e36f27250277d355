#include "matwalk/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "matwalk/errors.hpp"
#include "matwalk/walks.hpp"

namespace matwalk {

namespace {

constexpr double kEigTol = 1e-9;

int find_root(std::vector<int>& parent, int v) {
    while (parent[static_cast<size_t>(v)] != v) {
        parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
        v = parent[static_cast<size_t>(v)];
    }
    return v;
}

// downward closure of the support, grouped by subset size
std::vector<std::set<std::uint64_t>> support_closure(const ExplicitPolynomial& p) {
    int cap = dense_face_cap();
    std::vector<std::set<std::uint64_t>> levels(static_cast<size_t>(p.d) + 1);
    for (const auto& [mask, lc] : p.log_coefs) levels[static_cast<size_t>(p.d)].insert(mask);
    for (int k = p.d; k >= 1; --k) {
        for (std::uint64_t mask : levels[static_cast<size_t>(k)])
            for (int e : Subset(mask).indices()) levels[static_cast<size_t>(k) - 1].insert(Subset(mask).without(e).mask());
        if (static_cast<int>(levels[static_cast<size_t>(k) - 1].size()) > cap)
            throw resource_error("support closure: level " + std::to_string(k - 1) + " exceeds cap " +
                                 std::to_string(cap));
    }
    return levels;
}

Eigen::MatrixXd symmetrized(const WalkMatrix& walk) {
    int m = static_cast<int>(walk.faces.size());
    Eigen::VectorXd sq(m);
    for (int i = 0; i < m; ++i) sq(i) = std::sqrt(walk.w[static_cast<size_t>(i)]);
    Eigen::MatrixXd s(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s(i, j) = walk.p(i, j) * sq(i) / sq(j);
    return 0.5 * (s + s.transpose());
}

}  // namespace

CheckReport check_zero_local_expander(const WeightedComplex& x) {
    if (x.d < 2) throw input_error("check_zero_local_expander: requires d >= 2, got d=" + std::to_string(x.d));
    CheckReport rep;
    rep.property = "zero_local_spectral_expansion";
    rep.tolerance = kEigTol;
    rep.worst_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= x.d - 2; ++k) {
        for (Subset tau : x.faces[static_cast<size_t>(k)]) {
            Spectrum sp = spectrum(local_walk(x, tau));
            double l2 = sp.eigenvalues.size() > 1 ? sp.eigenvalues[1] : -1.0;
            if (l2 > rep.worst_value) {
                rep.worst_value = l2;
                rep.worst_face = tau;
                rep.has_worst_face = true;
            }
        }
    }
    rep.pass = rep.worst_value <= kEigTol;
    rep.detail = "max second eigenvalue over all local walks at levels 0.." + std::to_string(x.d - 2);
    return rep;
}

CheckReport check_strong_log_concavity(const ExplicitPolynomial& p) {
    if (p.d < 1) throw input_error("check_strong_log_concavity: requires degree >= 1");
    if (p.log_coefs.empty()) throw input_error("check_strong_log_concavity: empty support");
    CheckReport rep;
    rep.property = "strong_log_concavity";
    rep.tolerance = kEigTol;
    auto levels = support_closure(p);

    // condition 1: the 1-skeleton of every derivative link is connected.
    // each surviving term is a clique of positive-weight edges, so joining
    // consecutive elements of every term reproduces the components
    for (int k = 0; k + 2 <= p.d; ++k) {
        for (std::uint64_t tmask : levels[static_cast<size_t>(k)]) {
            std::vector<int> parent(static_cast<size_t>(p.n));
            std::iota(parent.begin(), parent.end(), 0);
            std::uint64_t vertices = 0;
            for (const auto& [smask, lc] : p.log_coefs) {
                if ((smask & tmask) != tmask) continue;
                auto elems = Subset(smask & ~tmask).indices();
                vertices |= smask & ~tmask;
                for (size_t i = 1; i < elems.size(); ++i) {
                    int ra = find_root(parent, elems[0]), rb = find_root(parent, elems[i]);
                    if (ra != rb) parent[static_cast<size_t>(rb)] = ra;
                }
            }
            std::set<int> roots;
            for (int v : Subset(vertices).indices()) roots.insert(find_root(parent, v));
            if (roots.size() > 1) {
                rep.pass = false;
                rep.worst_face = Subset(tmask);
                rep.has_worst_face = true;
                rep.worst_value = static_cast<double>(roots.size() - 1);
                rep.tolerance = 0.0;
                rep.detail = "1-skeleton of the link of " + Subset(tmask).str() + " splits into " +
                             std::to_string(roots.size()) + " components";
                return rep;
            }
        }
    }

    // condition 2: Hessians of the degree-2 restrictions, scaled by their
    // largest entry, have at most one eigenvalue above tolerance
    double worst = -std::numeric_limits<double>::infinity();
    if (p.d >= 2) {
        for (std::uint64_t tmask : levels[static_cast<size_t>(p.d) - 2]) {
            Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p.n, p.n);
            for (const auto& [smask, lc] : p.log_coefs) {
                if ((smask & tmask) != tmask) continue;
                auto pair = Subset(smask & ~tmask).indices();
                double c = std::exp(lc);  // relative scale is all the eigenvalue count needs
                hess(pair[0], pair[1]) += c;
                hess(pair[1], pair[0]) += c;
            }
            double scale = hess.cwiseAbs().maxCoeff();
            if (scale <= 0.0) continue;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess / scale);
            if (es.info() != Eigen::Success)
                throw numeric_error("check_strong_log_concavity: eigensolver failed");
            double second = es.eigenvalues()(p.n - 2);
            if (second > worst) {
                worst = second;
                rep.worst_face = Subset(tmask);
                rep.has_worst_face = true;
            }
        }
    }
    rep.worst_value = std::isfinite(worst) ? worst : 0.0;
    rep.pass = rep.worst_value <= kEigTol;
    rep.detail = "max second Hessian eigenvalue over degree-2 restrictions, relative to the largest entry";
    return rep;
}

CheckReport eigenvalue_count_check(const WeightedComplex& x, int k) {
    if (k < 1 || k >= x.d)
        throw state_error("eigenvalue_count_check: k must satisfy 1 <= k < d, got k=" + std::to_string(k));
    CheckReport expander = check_zero_local_expander(x);
    if (!expander.pass)
        throw state_error("eigenvalue_count_check: complex is not a 0-local-spectral-expander (worst " +
                          std::to_string(expander.worst_value) + " at " + expander.worst_face.str() + ")");
    CheckReport rep;
    rep.property = "eigenvalue_count_bound";
    rep.tolerance = kEigTol;
    Spectrum sp = spectrum(upper_walk(x, k));
    double worst_excess = -std::numeric_limits<double>::infinity();
    int worst_i = -1;
    for (int i = -1; i <= k; ++i) {
        double threshold = 1.0 - static_cast<double>(i + 1) / (k + 1);
        int count = 0;
        for (double l : sp.eigenvalues)
            if (l > threshold + kEigTol) ++count;
        int bound = i < 0 ? 0 : x.level_size(i);
        double excess = static_cast<double>(count - bound);
        if (excess > worst_excess) {
            worst_excess = excess;
            worst_i = i;
        }
    }
    rep.worst_value = worst_excess;
    rep.pass = worst_excess <= 0.0;
    rep.detail = "max over i of (eigenvalues above 1-(i+1)/(k+1)) minus the level size, worst at i=" +
                 std::to_string(worst_i) + ", k=" + std::to_string(k);
    return rep;
}

CheckReport loewner_domination_check(const WeightedComplex& x, int k) {
    if (k < 1 || k >= x.d)
        throw input_error("loewner_domination_check: k must satisfy 1 <= k < d, got k=" + std::to_string(k));
    CheckReport expander = check_zero_local_expander(x);
    if (!expander.pass)
        throw state_error("loewner_domination_check: complex is not a 0-local-spectral-expander (worst " +
                          std::to_string(expander.worst_value) + " at " + expander.worst_face.str() + ")");
    CheckReport rep;
    rep.property = "loewner_upper_vs_lower";
    rep.tolerance = kEigTol;
    WalkMatrix up = upper_walk(x, k);
    WalkMatrix low = lower_walk(x, k);
    int m = static_cast<int>(up.faces.size());
    WalkMatrix rhs;
    rhs.faces = low.faces;
    rhs.w = low.w;
    rhs.p = (static_cast<double>(k) / (k + 1)) * low.p +
            (1.0 / (k + 1)) * Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd diff = symmetrized(up) - symmetrized(rhs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
    if (es.info() != Eigen::Success) throw numeric_error("loewner_domination_check: eigensolver failed");
    rep.worst_value = es.eigenvalues()(m - 1);
    rep.pass = rep.worst_value <= kEigTol;
    rep.detail = "max eigenvalue of symmetrized(upper) - symmetrized(k/(k+1) lower + I/(k+1)) at k=" +
                 std::to_string(k);
    return rep;
}

}  // namespace matwalk
