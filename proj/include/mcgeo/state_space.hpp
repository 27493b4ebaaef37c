#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mcgeo/common.hpp"

namespace mcgeo {

// Finite product state space X = X^(1) x ... x X^(d). Flat indices are
// mixed-radix with coordinate 1 as the most significant digit:
//   flat(x) = ((x^1 * n_2 + x^2) * n_3 + x^3) ...
// Every matrix, distribution and file format in this library shares this
// convention.
class ProductStateSpace {
 public:
  explicit ProductStateSpace(std::vector<Index> factor_sizes)
      : sizes_(std::move(factor_sizes)) {
    require(!sizes_.empty(), "argument", "state space needs at least one factor");
    total_ = 1;
    for (Index s : sizes_) {
      require(s >= 1, "argument", "factor sizes must be positive");
      total_ *= s;
    }
  }

  static ProductStateSpace single(Index n) { return ProductStateSpace({n}); }

  // Hypercube {0,1}^n as n binary factors.
  static ProductStateSpace hypercube(Index n) {
    return ProductStateSpace(std::vector<Index>(static_cast<std::size_t>(n), 2));
  }

  Index dims() const { return static_cast<Index>(sizes_.size()); }
  Index total() const { return total_; }
  Index factor_size(Index i) const { return sizes_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& factor_sizes() const { return sizes_; }

  Index flat_index(const std::vector<Index>& multi) const {
    Index k = 0;
    for (Index i = 0; i < dims(); ++i) k = k * sizes_[static_cast<std::size_t>(i)] + multi[static_cast<std::size_t>(i)];
    return k;
  }

  std::vector<Index> unindex(Index k) const {
    std::vector<Index> multi(static_cast<std::size_t>(dims()));
    for (Index i = dims() - 1; i >= 0; --i) {
      const Index s = sizes_[static_cast<std::size_t>(i)];
      multi[static_cast<std::size_t>(i)] = k % s;
      k /= s;
    }
    return multi;
  }

  bool operator==(const ProductStateSpace& other) const { return sizes_ == other.sizes_; }
  bool operator!=(const ProductStateSpace& other) const { return !(*this == other); }

 private:
  std::vector<Index> sizes_;
  Index total_;
};

// Subset S of the coordinate set {1,...,d}, stored 0-based and sorted.
class CoordinateSubset {
 public:
  CoordinateSubset(Index d, std::vector<Index> members)
      : d_(d), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    require(d_ >= 1, "argument", "coordinate count must be positive");
    for (Index m : members_)
      require(m >= 0 && m < d_, "argument", "coordinate index out of range");
  }

  static CoordinateSubset full(Index d) {
    std::vector<Index> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), Index(0));
    return CoordinateSubset(d, std::move(all));
  }

  static CoordinateSubset singleton(Index d, Index i) { return CoordinateSubset(d, {i}); }

  static CoordinateSubset from_mask(Index d, unsigned mask) {
    std::vector<Index> m;
    for (Index i = 0; i < d; ++i)
      if (mask >> i & 1u) m.push_back(i);
    return CoordinateSubset(d, std::move(m));
  }

  Index dims() const { return d_; }
  Index size() const { return static_cast<Index>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const std::vector<Index>& members() const { return members_; }

  bool contains(Index i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

  CoordinateSubset complement() const {
    std::vector<Index> rest;
    for (Index i = 0; i < d_; ++i)
      if (!contains(i)) rest.push_back(i);
    return CoordinateSubset(d_, std::move(rest));
  }

  bool subset_of(const CoordinateSubset& other) const {
    for (Index m : members_)
      if (!other.contains(m)) return false;
    return true;
  }

  std::string to_string() const {  // 1-based, matching the CLI surface
    std::string out = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(members_[i] + 1);
    }
    return out + "}";
  }

 private:
  Index d_;
  std::vector<Index> members_;
};

// Precomputed projection of flat indices onto a coordinate subset: for every
// flat state k of `space`, sub[k] is the flat index of the S-coordinates in
// the subspace spanned by S (factors kept in increasing coordinate order).
struct SubsetIndexMap {
  ProductStateSpace subspace;
  std::vector<Index> sub;  // length space.total()

  SubsetIndexMap(const ProductStateSpace& space, const CoordinateSubset& s)
      : subspace(make_subspace(space, s)), sub(static_cast<std::size_t>(space.total())) {
    const Index d = space.dims();
    std::vector<Index> strides(static_cast<std::size_t>(d), 0);
    Index stride = 1;
    for (auto it = s.members().rbegin(); it != s.members().rend(); ++it) {
      strides[static_cast<std::size_t>(*it)] = stride;
      stride *= space.factor_size(*it);
    }
    std::vector<Index> multi(static_cast<std::size_t>(d), 0);
    for (Index k = 0; k < space.total(); ++k) {
      Index acc = 0;
      for (Index i = 0; i < d; ++i) acc += strides[static_cast<std::size_t>(i)] * multi[static_cast<std::size_t>(i)];
      sub[static_cast<std::size_t>(k)] = acc;
      for (Index i = d - 1; i >= 0; --i) {  // odometer increment
        if (++multi[static_cast<std::size_t>(i)] < space.factor_size(i)) break;
        multi[static_cast<std::size_t>(i)] = 0;
      }
    }
  }

  static ProductStateSpace make_subspace(const ProductStateSpace& space,
                                         const CoordinateSubset& s) {
    require(!s.empty(), "argument", "coordinate subset must be non-empty");
    require(s.dims() == space.dims(), "shape_mismatch",
            "subset is over a different coordinate count than the space");
    std::vector<Index> sizes;
    sizes.reserve(static_cast<std::size_t>(s.size()));
    for (Index m : s.members()) sizes.push_back(space.factor_size(m));
    return ProductStateSpace(std::move(sizes));
  }
};

}  // namespace mcgeo
