#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qmcx {

/// A subset of variable indices {0, ..., m-1} stored as a bitmask.
/// Used both for the derivative index set v and for partition blocks.
class VarSet {
  public:
    VarSet() = default;
    explicit VarSet(std::uint32_t mask) : mask_(mask) {}

    static VarSet full(int m) { return VarSet((m >= 32) ? ~0u : ((1u << m) - 1u)); }
    static VarSet single(int i) { return VarSet(1u << i); }
    static VarSet of(std::initializer_list<int> idx) {
        std::uint32_t m = 0;
        for (int i : idx) m |= 1u << i;
        return VarSet(m);
    }

    std::uint32_t mask() const { return mask_; }
    bool empty() const { return mask_ == 0; }
    int count() const { return __builtin_popcount(mask_); }
    bool contains(int i) const { return (mask_ >> i) & 1u; }
    int min_element() const { return __builtin_ctz(mask_); }

    VarSet with(int i) const { return VarSet(mask_ | (1u << i)); }
    VarSet without(int i) const { return VarSet(mask_ & ~(1u << i)); }
    bool subset_of(VarSet other) const { return (mask_ & ~other.mask_) == 0; }
    bool disjoint(VarSet other) const { return (mask_ & other.mask_) == 0; }
    VarSet unite(VarSet other) const { return VarSet(mask_ | other.mask_); }

    std::vector<int> elements() const {
        std::vector<int> e;
        for (std::uint32_t m = mask_; m; m &= m - 1) e.push_back(__builtin_ctz(m));
        return e;
    }

    /// 1-based rendering, e.g. "{1,3}" for bits {0,2}.
    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (int i : elements()) {
            if (!first) s += ",";
            s += std::to_string(i + 1);
            first = false;
        }
        return s + "}";
    }

    bool operator==(const VarSet&) const = default;

  private:
    std::uint32_t mask_ = 0;
};

/// Order used for canonical block sequences: cardinality first, then
/// lexicographic on the sorted element lists. Total on disjoint non-empty sets.
inline bool block_less(VarSet a, VarSet b) {
    if (a.count() != b.count()) return a.count() < b.count();
    std::uint32_t diff = a.mask() ^ b.mask();
    if (diff == 0) return false;
    // The smallest element where they differ decides; it belongs to the
    // lexicographically smaller set.
    return (a.mask() >> __builtin_ctz(diff)) & 1u;
}

}  // namespace qmcx
