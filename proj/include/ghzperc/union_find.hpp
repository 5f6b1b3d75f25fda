#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace ghzperc {

// Weighted quick-union with path halving.
class UnionFind {
 public:
  using index_type = std::uint32_t;

  explicit UnionFind(std::size_t size = 0) { reset(size); }

  void reset(std::size_t size) {
    parent_.resize(size);
    std::iota(parent_.begin(), parent_.end(), index_type{0});
    size_.assign(size, 1);
    sets_ = size;
  }

  std::size_t size() const noexcept { return parent_.size(); }

  // number of disjoint sets, singletons included
  std::size_t set_count() const noexcept { return sets_; }

  index_type find(index_type i) noexcept {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // read-only root lookup (no compression)
  index_type root(index_type i) const noexcept {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }

  /// Merges the sets of `a` and `b`. Returns the surviving root; `merged`
  /// is set to false when they already shared a set.
  index_type unite(index_type a, index_type b, bool* merged = nullptr) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) {
      if (merged) *merged = false;
      return a;
    }
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    if (merged) *merged = true;
    return a;
  }

  bool same(index_type a, index_type b) noexcept { return find(a) == find(b); }

  index_type set_size(index_type i) noexcept { return size_[find(i)]; }

 private:
  std::vector<index_type> parent_;
  std::vector<index_type> size_;
  std::size_t sets_ = 0;
};

}  // namespace ghzperc
