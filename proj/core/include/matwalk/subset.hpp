#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "matwalk/errors.hpp"

namespace matwalk {

// A subset of a ground set {0, ..., n-1}, n <= 64, stored as a bitmask.
// The public element view is always the strictly increasing index sequence.
class Subset {
public:
    Subset() = default;
    explicit constexpr Subset(std::uint64_t mask) : mask_(mask) {}

    // requires a strictly increasing sequence of indices in [0, 64)
    static Subset from_indices(const std::vector<int>& idx) {
        std::uint64_t m = 0;
        int prev = -1;
        for (int e : idx) {
            if (e < 0 || e >= 64) throw input_error("subset element out of range [0,64): " + std::to_string(e));
            if (e <= prev) throw input_error("subset elements must be strictly increasing");
            m |= std::uint64_t(1) << e;
            prev = e;
        }
        return Subset(m);
    }

    std::vector<int> indices() const {
        std::vector<int> out;
        out.reserve(static_cast<size_t>(size()));
        for (std::uint64_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
        return out;
    }

    constexpr std::uint64_t mask() const { return mask_; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr bool contains(int e) const { return (mask_ >> e) & 1; }
    constexpr bool contains_all(Subset s) const { return (mask_ & s.mask_) == s.mask_; }

    constexpr Subset with(int e) const { return Subset(mask_ | (std::uint64_t(1) << e)); }
    constexpr Subset without(int e) const { return Subset(mask_ & ~(std::uint64_t(1) << e)); }
    constexpr Subset unite(Subset s) const { return Subset(mask_ | s.mask_); }
    constexpr Subset intersect(Subset s) const { return Subset(mask_ & s.mask_); }
    constexpr Subset minus(Subset s) const { return Subset(mask_ & ~s.mask_); }

    // k-th smallest element, 0-based; caller guarantees k < size()
    int nth(int k) const {
        std::uint64_t m = mask_;
        while (k--) m &= m - 1;
        return std::countr_zero(m);
    }

    constexpr friend bool operator==(Subset a, Subset b) { return a.mask_ == b.mask_; }
    constexpr friend bool operator!=(Subset a, Subset b) { return a.mask_ != b.mask_; }

    // "{0 2 5}" notation for messages
    std::string str() const {
        std::string s = "{";
        bool first = true;
        for (int e : indices()) {
            if (!first) s += ' ';
            s += std::to_string(e);
            first = false;
        }
        return s + "}";
    }

    static constexpr Subset full(int n) {
        return Subset(n >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1);
    }

private:
    std::uint64_t mask_ = 0;
};

// lexicographic order on the increasing element sequences;
// for equal sizes this matches numeric order of the lowest differing element
inline bool lex_less(Subset a, Subset b) {
    std::uint64_t x = a.mask(), y = b.mask();
    while (x && y) {
        int ea = std::countr_zero(x), eb = std::countr_zero(y);
        if (ea != eb) return ea < eb;
        x &= x - 1;
        y &= y - 1;
    }
    return !x && y;
}

}  // namespace matwalk
