#include "matwalk/matroid.hpp"

#include <algorithm>
#include <numeric>

#include "matwalk/errors.hpp"

namespace matwalk {

namespace {

int greedy_rank(const MatroidBackend& b, std::uint64_t within, OracleCounter& c) {
    std::uint64_t kept = 0;
    for (std::uint64_t m = within; m; m &= m - 1) {
        std::uint64_t e = m & ~(m - 1);
        if (b.indep(kept | e, c)) kept |= e;
    }
    return std::popcount(kept);
}

struct UniformBackend final : MatroidBackend {
    int n, r;
    UniformBackend(int n, int r) : n(n), r(r) {}
    int size() const override { return n; }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        ++c.calls;
        return std::popcount(mask) <= r;
    }
    std::string describe() const override {
        return "uniform(n=" + std::to_string(n) + ",r=" + std::to_string(r) + ")";
    }
};

struct PartitionBackend final : MatroidBackend {
    int n;
    std::vector<std::uint64_t> block_masks;
    std::vector<int> caps;
    int size() const override { return n; }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        ++c.calls;
        for (size_t i = 0; i < block_masks.size(); ++i)
            if (std::popcount(mask & block_masks[i]) > caps[i]) return false;
        return true;
    }
    std::string describe() const override { return "partition(n=" + std::to_string(n) + ")"; }
};

struct GraphicBackend final : MatroidBackend {
    int vertices;
    std::vector<std::pair<int, int>> edges;
    int size() const override { return static_cast<int>(edges.size()); }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        ++c.calls;
        int parent[64];
        for (int v = 0; v < vertices; ++v) parent[v] = v;
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (std::uint64_t m = mask; m; m &= m - 1) {
            const auto& e = edges[static_cast<size_t>(std::countr_zero(m))];
            int a = find(e.first), b = find(e.second);
            if (a == b) return false;
            parent[a] = b;
        }
        return true;
    }
    std::string describe() const override {
        return "graphic(V=" + std::to_string(vertices) + ",E=" + std::to_string(edges.size()) + ")";
    }
};

struct LinearBackend final : MatroidBackend {
    int p, rows, cols;
    std::vector<std::vector<int>> col_vecs;  // column-major, entries in [0, p)
    int size() const override { return cols; }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        ++c.calls;
        int k = std::popcount(mask);
        if (k > rows) return false;
        if (k == 0) return true;
        // gaussian elimination mod p on the selected columns
        std::vector<std::vector<int>> a;
        a.reserve(static_cast<size_t>(k));
        for (std::uint64_t m = mask; m; m &= m - 1) a.push_back(col_vecs[static_cast<size_t>(std::countr_zero(m))]);
        int rank = 0;
        for (int row = 0; row < rows && rank < k; ++row) {
            int pivot = -1;
            for (int j = rank; j < k; ++j)
                if (a[static_cast<size_t>(j)][static_cast<size_t>(row)] != 0) {
                    pivot = j;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(a[static_cast<size_t>(rank)], a[static_cast<size_t>(pivot)]);
            const auto& pr = a[static_cast<size_t>(rank)];
            int inv = 1, base = pr[static_cast<size_t>(row)] % p, e = p - 2;
            while (e) {  // fermat inverse, p prime
                if (e & 1) inv = inv * base % p;
                base = base * base % p;
                e >>= 1;
            }
            for (int j = rank + 1; j < k; ++j) {
                auto& cj = a[static_cast<size_t>(j)];
                int f = cj[static_cast<size_t>(row)] * inv % p;
                if (f == 0) continue;
                for (int i = row; i < rows; ++i)
                    cj[static_cast<size_t>(i)] = ((cj[static_cast<size_t>(i)] - f * pr[static_cast<size_t>(i)]) % p + p) % p;
            }
            ++rank;
        }
        return rank == k;
    }
    std::string describe() const override {
        return "linear(GF(" + std::to_string(p) + ")," + std::to_string(rows) + "x" + std::to_string(cols) + ")";
    }
};

struct TruncateBackend final : MatroidBackend {
    std::shared_ptr<const MatroidBackend> inner;
    int k;
    int size() const override { return inner->size(); }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        if (std::popcount(mask) > k) {
            ++c.calls;
            return false;
        }
        return inner->indep(mask, c);
    }
    std::string describe() const override { return "truncate(" + inner->describe() + ",k=" + std::to_string(k) + ")"; }
};

struct MinorBackend final : MatroidBackend {
    std::shared_ptr<const MatroidBackend> inner;
    std::uint64_t contracted;              // always independent in inner
    std::vector<int> old_of_new;           // dense re-index into inner's ground set
    int size() const override { return static_cast<int>(old_of_new.size()); }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        std::uint64_t expanded = contracted;
        for (std::uint64_t m = mask; m; m &= m - 1)
            expanded |= std::uint64_t(1) << old_of_new[static_cast<size_t>(std::countr_zero(m))];
        return inner->indep(expanded, c);
    }
    std::string describe() const override { return "minor(" + inner->describe() + ")"; }
};

struct DualBackend final : MatroidBackend {
    std::shared_ptr<const MatroidBackend> inner;
    int inner_rank;
    int size() const override { return inner->size(); }
    bool indep(std::uint64_t mask, OracleCounter& c) const override {
        // independent in the dual iff the complement still spans
        std::uint64_t comp = Subset::full(inner->size()).mask() & ~mask;
        std::uint64_t kept = 0;
        int got = 0;
        for (std::uint64_t m = comp; m; m &= m - 1) {
            std::uint64_t e = m & ~(m - 1);
            if (inner->indep(kept | e, c)) {
                kept |= e;
                if (++got == inner_rank) return true;
            }
        }
        return got == inner_rank;
    }
    std::string describe() const override { return "dual(" + inner->describe() + ")"; }
};

std::vector<int> identity_labels(int n) {
    std::vector<int> l(static_cast<size_t>(n));
    std::iota(l.begin(), l.end(), 0);
    return l;
}

}  // namespace

Matroid Matroid::wrap(std::shared_ptr<const MatroidBackend> impl, std::vector<int> labels) {
    Matroid m;
    m.counter_ = std::make_shared<OracleCounter>();
    m.rank_ = greedy_rank(*impl, Subset::full(impl->size()).mask(), *m.counter_);
    m.impl_ = std::move(impl);
    m.labels_ = std::move(labels);
    return m;
}

int Matroid::rank_of(Subset s) const {
    return greedy_rank(*impl_, s.mask(), *counter_);
}

Subset Matroid::greedy_basis() const {
    std::uint64_t kept = 0;
    for (int e = 0; e < size(); ++e) {
        std::uint64_t bit = std::uint64_t(1) << e;
        if (impl_->indep(kept | bit, *counter_)) kept |= bit;
    }
    return Subset(kept);
}

std::vector<int> Matroid::loops() const {
    std::vector<int> out;
    for (int e = 0; e < size(); ++e)
        if (!is_independent(Subset(0).with(e))) out.push_back(e);
    return out;
}

std::vector<std::vector<int>> Matroid::parallel_classes() const {
    int n = size();
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v) v = parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
        return v;
    };
    std::vector<int> nonloops;
    for (int e = 0; e < n; ++e)
        if (is_independent(Subset(0).with(e))) nonloops.push_back(e);
    for (size_t i = 0; i < nonloops.size(); ++i)
        for (size_t j = i + 1; j < nonloops.size(); ++j)
            if (!is_independent(Subset(0).with(nonloops[i]).with(nonloops[j]))) {
                int a = find(nonloops[i]), b = find(nonloops[j]);
                if (a != b) parent[static_cast<size_t>(a)] = b;
            }
    std::vector<std::vector<int>> classes;
    std::vector<int> class_of(static_cast<size_t>(n), -1);
    for (int e : nonloops) {
        int root = find(e);
        if (class_of[static_cast<size_t>(root)] < 0) {
            class_of[static_cast<size_t>(root)] = static_cast<int>(classes.size());
            classes.emplace_back();
        }
        classes[static_cast<size_t>(class_of[static_cast<size_t>(root)])].push_back(e);
    }
    return classes;
}

Matroid Matroid::contract(Subset s) const {
    if (!Subset::full(size()).contains_all(s)) throw input_error("contract: set not within ground set");
    if (!is_independent(s)) throw input_error("contract: set must be independent, got " + s.str());
    auto mb = std::make_shared<MinorBackend>();
    mb->inner = impl_;
    mb->contracted = s.mask();
    std::vector<int> new_labels;
    for (int e = 0; e < size(); ++e)
        if (!s.contains(e)) {
            mb->old_of_new.push_back(e);
            new_labels.push_back(labels_[static_cast<size_t>(e)]);
        }
    return wrap(std::move(mb), std::move(new_labels));
}

Matroid Matroid::remove(Subset s) const {
    if (!Subset::full(size()).contains_all(s)) throw input_error("delete: set not within ground set");
    auto mb = std::make_shared<MinorBackend>();
    mb->inner = impl_;
    mb->contracted = 0;
    std::vector<int> new_labels;
    for (int e = 0; e < size(); ++e)
        if (!s.contains(e)) {
            mb->old_of_new.push_back(e);
            new_labels.push_back(labels_[static_cast<size_t>(e)]);
        }
    return wrap(std::move(mb), std::move(new_labels));
}

Matroid Matroid::dual() const {
    auto db = std::make_shared<DualBackend>();
    db->inner = impl_;
    db->inner_rank = rank_;
    return wrap(std::move(db), labels_);
}

Matroid Matroid::truncate(int k) const {
    if (k < 0) throw input_error("truncate: k must be >= 0");
    auto tb = std::make_shared<TruncateBackend>();
    tb->inner = impl_;
    tb->k = k;
    return wrap(std::move(tb), labels_);
}

Matroid uniform_matroid(int n, int r) {
    if (n < 0 || n > 64) throw input_error("uniform: n must be in [0, 64]");
    if (r < 0 || r > n) throw input_error("uniform: r must be in [0, n]");
    return Matroid::wrap(std::make_shared<UniformBackend>(n, r), [&] {
        std::vector<int> l(static_cast<size_t>(n));
        std::iota(l.begin(), l.end(), 0);
        return l;
    }());
}

Matroid partition_matroid(const std::vector<std::vector<int>>& blocks, const std::vector<int>& caps) {
    if (blocks.size() != caps.size()) throw input_error("partition: blocks and caps must have equal length");
    auto pb = std::make_shared<PartitionBackend>();
    std::uint64_t seen = 0;
    int n = 0;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (caps[i] < 0) throw input_error("partition: caps[" + std::to_string(i) + "] must be >= 0");
        std::uint64_t bm = 0;
        for (int e : blocks[i]) {
            if (e < 0 || e >= 64) throw input_error("partition: element out of range in blocks[" + std::to_string(i) + "]");
            std::uint64_t bit = std::uint64_t(1) << e;
            if (seen & bit) throw input_error("partition: element " + std::to_string(e) + " appears in two blocks");
            seen |= bit;
            bm |= bit;
            n = std::max(n, e + 1);
        }
        pb->block_masks.push_back(bm);
        pb->caps.push_back(caps[i]);
    }
    if (seen != Subset::full(n).mask())
        throw input_error("partition: blocks must cover 0..n-1 with no gaps");
    pb->n = n;
    std::vector<int> l(static_cast<size_t>(n));
    std::iota(l.begin(), l.end(), 0);
    return Matroid::wrap(std::move(pb), std::move(l));
}

Matroid graphic_matroid(int vertices, const std::vector<std::pair<int, int>>& edges) {
    if (vertices < 0 || vertices > 64) throw input_error("graphic: vertices must be in [0, 64]");
    if (edges.size() > 64) throw input_error("graphic: at most 64 edges supported");
    for (size_t i = 0; i < edges.size(); ++i)
        if (edges[i].first < 0 || edges[i].first >= vertices || edges[i].second < 0 || edges[i].second >= vertices)
            throw input_error("graphic: edges[" + std::to_string(i) + "] endpoint out of range");
    auto gb = std::make_shared<GraphicBackend>();
    gb->vertices = vertices;
    gb->edges = edges;
    std::vector<int> l(edges.size());
    std::iota(l.begin(), l.end(), 0);
    return Matroid::wrap(std::move(gb), std::move(l));
}

Matroid linear_matroid_gfp(int p, const std::vector<std::vector<int>>& matrix_rows) {
    if (p < 2) throw input_error("linear: field order must be a prime >= 2");
    for (int f = 2; f * f <= p; ++f)
        if (p % f == 0) throw input_error("linear: field order " + std::to_string(p) + " is not prime");
    if (matrix_rows.empty()) throw input_error("linear: matrix must have at least one row");
    size_t cols = matrix_rows[0].size();
    if (cols == 0 || cols > 64) throw input_error("linear: column count must be in [1, 64]");
    for (size_t i = 1; i < matrix_rows.size(); ++i)
        if (matrix_rows[i].size() != cols) throw input_error("linear: ragged matrix at row " + std::to_string(i));
    auto lb = std::make_shared<LinearBackend>();
    lb->p = p;
    lb->rows = static_cast<int>(matrix_rows.size());
    lb->cols = static_cast<int>(cols);
    lb->col_vecs.assign(cols, std::vector<int>(matrix_rows.size()));
    for (size_t i = 0; i < matrix_rows.size(); ++i)
        for (size_t j = 0; j < cols; ++j) lb->col_vecs[j][i] = ((matrix_rows[i][j] % p) + p) % p;
    std::vector<int> l(cols);
    std::iota(l.begin(), l.end(), 0);
    return Matroid::wrap(std::move(lb), std::move(l));
}

}  // namespace matwalk
