#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "matwalk/subset.hpp"

namespace matwalk {

struct OracleCounter {
    std::uint64_t calls = 0;
};

// implementation side of the independence oracle; immutable after construction
// so composition trees can be shared freely across handles and workers
struct MatroidBackend {
    virtual ~MatroidBackend() = default;
    virtual int size() const = 0;
    virtual bool indep(std::uint64_t mask, OracleCounter& c) const = 0;
    virtual std::string describe() const = 0;
};

// value handle: shares the immutable backend tree, owns a call counter.
// a single handle is not safe for concurrent use; give each worker
// with_fresh_counter() and merge the tallies afterwards
class Matroid {
public:
    Matroid() = default;

    int size() const { return impl_->size(); }
    int rank() const { return rank_; }

    bool is_independent(Subset s) const { return impl_->indep(s.mask(), *counter_); }

    // greedy scan of s in increasing index order
    int rank_of(Subset s) const;

    bool is_basis(Subset s) const { return s.size() == rank_ && is_independent(s); }

    // lexicographically first basis
    Subset greedy_basis() const;

    std::vector<int> loops() const;
    std::vector<std::vector<int>> parallel_classes() const;

    // pre: s independent; ground set re-indexed densely, labels() keeps the map
    Matroid contract(Subset s) const;
    Matroid remove(Subset s) const;
    Matroid dual() const;
    Matroid truncate(int k) const;

    std::uint64_t oracle_calls() const { return counter_->calls; }
    Matroid with_fresh_counter() const {
        Matroid m = *this;
        m.counter_ = std::make_shared<OracleCounter>();
        return m;
    }
    void add_calls(std::uint64_t c) const { counter_->calls += c; }

    // original root-matroid element behind each current index
    const std::vector<int>& labels() const { return labels_; }

    std::string describe() const { return impl_->describe(); }

    static Matroid wrap(std::shared_ptr<const MatroidBackend> impl, std::vector<int> labels);

private:
    std::shared_ptr<const MatroidBackend> impl_;
    std::shared_ptr<OracleCounter> counter_;
    int rank_ = 0;
    std::vector<int> labels_;
};

Matroid uniform_matroid(int n, int r);
Matroid partition_matroid(const std::vector<std::vector<int>>& blocks, const std::vector<int>& caps);
Matroid graphic_matroid(int vertices, const std::vector<std::pair<int, int>>& edges);
Matroid linear_matroid_gfp(int p, const std::vector<std::vector<int>>& matrix_rows);

}  // namespace matwalk
