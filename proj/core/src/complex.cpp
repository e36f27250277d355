#include "matwalk/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "matwalk/errors.hpp"

namespace matwalk {

bool WeightedComplex::has_face(Subset t) const {
    int k = t.size();
    if (k > d) return false;
    const auto& idx = index[static_cast<size_t>(k)];
    return idx.find(t.mask()) != idx.end();
}

double WeightedComplex::weight_of(Subset t) const {
    int k = t.size();
    if (k <= d) {
        const auto& idx = index[static_cast<size_t>(k)];
        auto it = idx.find(t.mask());
        if (it != idx.end()) return weights[static_cast<size_t>(k)][static_cast<size_t>(it->second)];
    }
    throw input_error("weight_of: " + t.str() + " is not a face");
}

int dense_face_cap() {
    const char* env = std::getenv("MATROID_WALKS_CAP");
    if (!env || !*env) return 5000;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw input_error("MATROID_WALKS_CAP must be a positive integer, got \"" + std::string(env) + "\"");
    return static_cast<int>(std::min<long>(v, 1'000'000));
}

namespace {

void sort_level(std::vector<Subset>& level) {
    std::sort(level.begin(), level.end(), [](Subset a, Subset b) { return lex_less(a, b); });
}

void build_index(WeightedComplex& x) {
    x.index.assign(static_cast<size_t>(x.d) + 1, {});
    for (int k = 0; k <= x.d; ++k) {
        auto& idx = x.index[static_cast<size_t>(k)];
        const auto& level = x.faces[static_cast<size_t>(k)];
        idx.reserve(level.size() * 2);
        for (size_t i = 0; i < level.size(); ++i) idx.emplace(level[i].mask(), static_cast<int>(i));
    }
}

}  // namespace

WeightedComplex build_complex(const ExplicitPolynomial& p) {
    if (p.log_coefs.empty()) throw input_error("build_complex: polynomial has empty support");
    int cap = dense_face_cap();
    WeightedComplex x;
    x.n = p.n;
    x.d = p.d;
    x.faces.assign(static_cast<size_t>(p.d) + 1, {});
    x.weights.assign(static_cast<size_t>(p.d) + 1, {});

    // top level straight from the support, in true coefficient scale
    std::map<std::uint64_t, double> cur;
    for (const auto& [mask, lc] : p.log_coefs) {
        double c = std::exp(lc + p.log_scale);
        if (!std::isfinite(c) || c <= 0.0)
            throw numeric_error("build_complex: coefficient of " + Subset(mask).str() +
                                " leaves double range; rescale the polynomial");
        cur[mask] = c;
    }

    for (int k = p.d; k >= 0; --k) {
        if (static_cast<int>(cur.size()) > cap)
            throw resource_error("build_complex: level " + std::to_string(k) + " has " +
                                 std::to_string(cur.size()) + " faces, cap is " + std::to_string(cap));
        auto& level = x.faces[static_cast<size_t>(k)];
        auto& wts = x.weights[static_cast<size_t>(k)];
        level.reserve(cur.size());
        for (const auto& [mask, w] : cur) level.push_back(Subset(mask));
        sort_level(level);
        wts.reserve(level.size());
        for (Subset s : level) {
            double w = cur[s.mask()];
            if (!std::isfinite(w))
                throw numeric_error("build_complex: weight of " + s.str() + " leaves double range");
            wts.push_back(w);
        }
        if (k == 0) break;
        std::map<std::uint64_t, double> below;
        for (const auto& [mask, w] : cur)
            for (int e : Subset(mask).indices()) below[Subset(mask).without(e).mask()] += w;
        cur = std::move(below);
    }
    build_index(x);
    return x;
}

WeightedComplex link(const WeightedComplex& x, Subset tau) {
    if (!x.has_face(tau)) throw input_error("link: " + tau.str() + " is not a face");
    int kt = tau.size();
    WeightedComplex l;
    l.n = x.n;
    l.d = x.d - kt;
    l.faces.assign(static_cast<size_t>(l.d) + 1, {});
    l.weights.assign(static_cast<size_t>(l.d) + 1, {});
    for (int k = kt; k <= x.d; ++k) {
        const auto& level = x.faces[static_cast<size_t>(k)];
        const auto& wts = x.weights[static_cast<size_t>(k)];
        std::vector<std::pair<Subset, double>> rows;
        for (size_t i = 0; i < level.size(); ++i)
            if (level[i].contains_all(tau)) rows.emplace_back(level[i].minus(tau), wts[i]);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
        auto& out_faces = l.faces[static_cast<size_t>(k - kt)];
        auto& out_wts = l.weights[static_cast<size_t>(k - kt)];
        for (const auto& [s, w] : rows) {
            out_faces.push_back(s);
            out_wts.push_back(w);
        }
    }
    build_index(l);
    return l;
}

}  // namespace matwalk
