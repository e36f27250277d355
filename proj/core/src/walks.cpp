#include "matwalk/walks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matwalk/errors.hpp"

namespace matwalk {

WalkMatrix upper_walk(const WeightedComplex& x, int k) {
    if (k < 1 || k >= x.d)
        throw input_error("upper_walk: k must satisfy 1 <= k < d, got k=" + std::to_string(k) +
                          " with d=" + std::to_string(x.d));
    const auto& level = x.faces[static_cast<size_t>(k)];
    const auto& wts = x.weights[static_cast<size_t>(k)];
    const auto& idx = x.index[static_cast<size_t>(k)];
    int m = static_cast<int>(level.size());
    WalkMatrix out;
    out.faces = level;
    out.w = wts;
    out.p = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) out.p(i, i) = 1.0 / (k + 1);
    const auto& above = x.faces[static_cast<size_t>(k) + 1];
    const auto& above_w = x.weights[static_cast<size_t>(k) + 1];
    for (size_t s = 0; s < above.size(); ++s) {
        auto elems = above[s].indices();
        for (int ea : elems) {
            int a = idx.at(above[s].without(ea).mask());
            for (int eb : elems) {
                if (eb == ea) continue;
                int b = idx.at(above[s].without(eb).mask());
                out.p(a, b) += above_w[s] / ((k + 1) * wts[static_cast<size_t>(a)]);
            }
        }
    }
    return out;
}

WalkMatrix lower_walk(const WeightedComplex& x, int k) {
    if (k < 1 || k > x.d)
        throw input_error("lower_walk: k must satisfy 1 <= k <= d, got k=" + std::to_string(k) +
                          " with d=" + std::to_string(x.d));
    const auto& level = x.faces[static_cast<size_t>(k)];
    const auto& wts = x.weights[static_cast<size_t>(k)];
    const auto& below_idx = x.index[static_cast<size_t>(k) - 1];
    const auto& below_w = x.weights[static_cast<size_t>(k) - 1];
    int m = static_cast<int>(level.size());
    WalkMatrix out;
    out.faces = level;
    out.w = wts;
    out.p = Eigen::MatrixXd::Zero(m, m);
    // group level faces under each drop target; each unordered pair of faces
    // shares at most one drop target, so entries accumulate without collision
    std::vector<std::vector<int>> up(below_w.size());
    for (int i = 0; i < m; ++i)
        for (int e : level[static_cast<size_t>(i)].indices())
            up[static_cast<size_t>(below_idx.at(level[static_cast<size_t>(i)].without(e).mask()))].push_back(i);
    for (size_t t = 0; t < up.size(); ++t) {
        double wt = below_w[t];
        for (int a : up[t])
            for (int b : up[t]) out.p(a, b) += wts[static_cast<size_t>(b)] / (k * wt);
    }
    return out;
}

WalkMatrix local_walk(const WeightedComplex& x, Subset tau) {
    if (!x.has_face(tau)) throw input_error("local_walk: " + tau.str() + " is not a face");
    if (tau.size() > x.d - 2)
        throw input_error("local_walk: link of " + tau.str() + " has dimension " +
                          std::to_string(x.d - tau.size()) + " < 2");
    WeightedComplex l = link(x, tau);
    WalkMatrix w = upper_walk(l, 1);
    int m = static_cast<int>(w.faces.size());
    w.p = 2.0 * w.p - Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i) w.p(i, i) = 0.0;
    return w;
}

WalkMatrix normalized_hessian(const ExplicitPolynomial& p, Subset tau) {
    int k = tau.size();
    if (p.d - k < 2)
        throw input_error("normalized_hessian: restriction to " + tau.str() + " has degree " +
                          std::to_string(p.d - k) + " < 2");
    ExplicitPolynomial q = derivative_link(p, tau);
    if (q.log_coefs.empty())
        throw state_error("normalized_hessian: polynomial vanishes after restricting to " + tau.str());
    std::vector<double> grad(static_cast<size_t>(p.n), 0.0);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p.n, p.n);
    for (const auto& [mask, lc] : q.log_coefs) {
        double c = std::exp(lc + q.log_scale);
        if (!std::isfinite(c))
            throw numeric_error("normalized_hessian: coefficient of " + Subset(mask).str() +
                                " leaves double range");
        auto elems = Subset(mask).indices();
        for (int i : elems) {
            grad[static_cast<size_t>(i)] += c;
            for (int j : elems)
                if (j != i) hess(i, j) += c;
        }
    }
    std::vector<int> rows;
    for (int i = 0; i < p.n; ++i)
        if (grad[static_cast<size_t>(i)] > 0.0) rows.push_back(i);
    int m = static_cast<int>(rows.size());
    WalkMatrix out;
    out.p = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        out.faces.push_back(Subset(0).with(rows[static_cast<size_t>(a)]));
        out.w.push_back(grad[static_cast<size_t>(rows[static_cast<size_t>(a)])]);
        for (int b = 0; b < m; ++b)
            out.p(a, b) = hess(rows[static_cast<size_t>(a)], rows[static_cast<size_t>(b)]) /
                          ((p.d - k - 1) * grad[static_cast<size_t>(rows[static_cast<size_t>(a)])]);
    }
    return out;
}

Spectrum spectrum(const WalkMatrix& walk) {
    int m = static_cast<int>(walk.faces.size());
    if (m == 0) throw input_error("spectrum: empty walk matrix");
    Eigen::VectorXd sq(m);
    for (int i = 0; i < m; ++i) {
        double wi = walk.w[static_cast<size_t>(i)];
        if (!(wi > 0.0) || !std::isfinite(wi))
            throw numeric_error("spectrum: nonpositive stationary weight at row " + std::to_string(i));
        sq(i) = std::sqrt(wi);
    }
    Eigen::MatrixXd s(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s(i, j) = walk.p(i, j) * sq(i) / sq(j);
    Spectrum out;
    out.residual = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (out.residual > 1e-9)
        throw numeric_error("spectrum: symmetrization residual " + std::to_string(out.residual) +
                            " exceeds 1e-9; balance or reversibility is broken");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
    if (es.info() != Eigen::Success) throw numeric_error("spectrum: eigensolver failed to converge");
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
    std::reverse(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

}  // namespace matwalk
