#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "mcgeo/common.hpp"
#include "mcgeo/state_space.hpp"

namespace mcgeo {

namespace detail {

// Rescales a non-negative vector to unit mass. Deviations up to
// tol::normalize are treated as float noise; anything worse is rejected.
template <typename Scalar>
void normalize_mass(Eigen::Ref<Vector<Scalar>> v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    require(v[i] >= Scalar(-1e-12), "argument",
            std::string(what) + " has a negative entry at index " + std::to_string(i));
    if (v[i] < Scalar(0)) v[i] = Scalar(0);
  }
  const Scalar sum = v.sum();
  require(std::abs(sum - Scalar(1)) <= Scalar(tol::normalize), "argument",
          std::string(what) + " sums to " + std::to_string(static_cast<double>(sum)) +
              ", not 1");
  v /= sum;
}

}  // namespace detail

// Probability mass on a ProductStateSpace, flat-indexed.
template <typename Scalar>
class DistributionT {
 public:
  DistributionT(ProductStateSpace space, Vector<Scalar> mass)
      : space_(std::move(space)), mass_(std::move(mass)) {
    require(mass_.size() == space_.total(), "shape_mismatch",
            "distribution length does not match the state space");
    detail::normalize_mass<Scalar>(mass_, "distribution");
  }

  static DistributionT uniform(const ProductStateSpace& space) {
    return DistributionT(space, Vector<Scalar>::Constant(space.total(),
                                                         Scalar(1) / Scalar(space.total())));
  }

  static DistributionT point_mass(const ProductStateSpace& space, Index x) {
    Vector<Scalar> m = Vector<Scalar>::Zero(space.total());
    m[x] = Scalar(1);
    return DistributionT(space, std::move(m));
  }

  const ProductStateSpace& space() const { return space_; }
  const Vector<Scalar>& mass() const { return mass_; }
  Scalar operator()(Index x) const { return mass_[x]; }
  Index size() const { return mass_.size(); }

  bool positive() const { return mass_.minCoeff() > Scalar(0); }

  // Same mass under a different factorization of the same flat index range
  // (e.g. a hypercube viewed as one composite factor).
  DistributionT reshaped(const ProductStateSpace& space) const {
    require(space.total() == space_.total(), "shape_mismatch",
            "reshape requires an equal total state count");
    return DistributionT(space, mass_);
  }

  // Keep-S-in marginal.
  DistributionT marginal(const CoordinateSubset& s) const {
    SubsetIndexMap map(space_, s);
    Vector<Scalar> out = Vector<Scalar>::Zero(map.subspace.total());
    for (Index k = 0; k < mass_.size(); ++k) out[map.sub[static_cast<std::size_t>(k)]] += mass_[k];
    return DistributionT(map.subspace, std::move(out));
  }

 private:
  ProductStateSpace space_;
  Vector<Scalar> mass_;
};

// Row-stochastic transition matrix over a (possibly product) state space.
template <typename Scalar>
class StochasticMatrixT {
 public:
  StochasticMatrixT(ProductStateSpace space, Matrix<Scalar> rows)
      : space_(std::move(space)), rows_(std::move(rows)) {
    require(rows_.rows() == space_.total() && rows_.cols() == space_.total(),
            "shape_mismatch", "matrix shape does not match the state space");
    for (Index x = 0; x < rows_.rows(); ++x) {
      auto row = rows_.row(x);
      for (Index y = 0; y < row.size(); ++y) {
        require(row[y] >= Scalar(-1e-12), "argument",
                "negative transition probability at (" + std::to_string(x) + "," +
                    std::to_string(y) + ")");
        if (row[y] < Scalar(0)) row[y] = Scalar(0);
      }
      const Scalar sum = row.sum();
      require(std::abs(sum - Scalar(1)) <= Scalar(tol::normalize), "argument",
              "row " + std::to_string(x) + " sums to " +
                  std::to_string(static_cast<double>(sum)) + ", not 1");
      row /= sum;
    }
  }

  static StochasticMatrixT identity(const ProductStateSpace& space) {
    return StochasticMatrixT(space, Matrix<Scalar>::Identity(space.total(), space.total()));
  }

  // Matrix with every row equal to pi (the "already mixed" chain).
  static StochasticMatrixT constant_rows(const DistributionT<Scalar>& pi) {
    Matrix<Scalar> m(pi.size(), pi.size());
    for (Index x = 0; x < pi.size(); ++x) m.row(x) = pi.mass().transpose();
    return StochasticMatrixT(pi.space(), std::move(m));
  }

  const ProductStateSpace& space() const { return space_; }
  const Matrix<Scalar>& rows() const { return rows_; }
  Scalar operator()(Index x, Index y) const { return rows_(x, y); }
  Index size() const { return rows_.rows(); }

  StochasticMatrixT reshaped(const ProductStateSpace& space) const {
    require(space.total() == space_.total(), "shape_mismatch",
            "reshape requires an equal total state count");
    return StochasticMatrixT(space, rows_);
  }

  bool lazy() const { return rows_.diagonal().minCoeff() >= Scalar(0.5) - Scalar(1e-15); }

 private:
  ProductStateSpace space_;
  Matrix<Scalar> rows_;
};

// Joint law of one transition (x, y); entries sum to 1.
template <typename Scalar>
class EdgeMeasureT {
 public:
  EdgeMeasureT(ProductStateSpace space, Matrix<Scalar> mass)
      : space_(std::move(space)), mass_(std::move(mass)) {
    require(mass_.rows() == space_.total() && mass_.cols() == space_.total(),
            "shape_mismatch", "edge measure shape does not match the state space");
    Eigen::Map<Vector<Scalar>> flat(mass_.data(), mass_.size());
    detail::normalize_mass<Scalar>(flat, "edge measure");
  }

  const ProductStateSpace& space() const { return space_; }
  const Matrix<Scalar>& mass() const { return mass_; }

  DistributionT<Scalar> first_marginal() const {
    return DistributionT<Scalar>(space_, mass_.rowwise().sum());
  }
  DistributionT<Scalar> second_marginal() const {
    return DistributionT<Scalar>(space_, mass_.colwise().sum().transpose());
  }

 private:
  ProductStateSpace space_;
  Matrix<Scalar> mass_;
};

using Distribution = DistributionT<double>;
using StochasticMatrix = StochasticMatrixT<double>;
using EdgeMeasure = EdgeMeasureT<double>;

// ---------------------------------------------------------------------------
// Support-graph structure
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
std::vector<Index> reach_from(const Matrix<Scalar>& p, Index start, bool reverse) {
  const Index n = p.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{start}, order;
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (Index v = 0; v < n; ++v) {
      const Scalar w = reverse ? p(v, u) : p(u, v);
      if (w > Scalar(0) && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
  }
  return order;
}

}  // namespace detail

// Structural irreducibility: the support graph is strongly connected.
// On failure, reports one unreachable ordered state pair.
template <typename Scalar>
bool is_irreducible(const StochasticMatrixT<Scalar>& p, std::pair<Index, Index>* witness = nullptr) {
  const Index n = p.size();
  auto fwd = detail::reach_from(p.rows(), 0, false);
  if (static_cast<Index>(fwd.size()) < n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Index u : fwd) seen[static_cast<std::size_t>(u)] = 1;
    for (Index v = 0; v < n; ++v)
      if (!seen[static_cast<std::size_t>(v)]) {
        if (witness) *witness = {0, v};
        return false;
      }
  }
  auto bwd = detail::reach_from(p.rows(), 0, true);
  if (static_cast<Index>(bwd.size()) < n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Index u : bwd) seen[static_cast<std::size_t>(u)] = 1;
    for (Index v = 0; v < n; ++v)
      if (!seen[static_cast<std::size_t>(v)]) {
        if (witness) *witness = {v, 0};
        return false;
      }
  }
  return true;
}

// Period of an irreducible chain: gcd of (depth(u) + 1 - depth(v)) over
// support edges u -> v, with depths from a BFS tree.
template <typename Scalar>
Index period(const StochasticMatrixT<Scalar>& p) {
  const Index n = p.size();
  std::vector<Index> depth(static_cast<std::size_t>(n), -1);
  std::vector<Index> queue{0};
  depth[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const Index u = queue[h];
    for (Index v = 0; v < n; ++v)
      if (p(u, v) > Scalar(0) && depth[static_cast<std::size_t>(v)] < 0) {
        depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
  }
  Index g = 0;
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < n; ++v)
      if (p(u, v) > Scalar(0))
        g = std::gcd(g, depth[static_cast<std::size_t>(u)] + 1 - depth[static_cast<std::size_t>(v)]);
  return g == 0 ? 1 : std::abs(g);
}

template <typename Scalar>
bool is_ergodic(const StochasticMatrixT<Scalar>& p) {
  return is_irreducible(p) && period(p) == 1;
}

template <typename Scalar>
Scalar stationarity_residual(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  Vector<Scalar> r = p.rows().transpose() * pi.mass() - pi.mass();
  return r.template lpNorm<Eigen::Infinity>();
}

template <typename Scalar>
Scalar reversibility_residual(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  Matrix<Scalar> flow = pi.mass().asDiagonal() * p.rows();
  return (flow - flow.transpose()).template lpNorm<Eigen::Infinity>();
}

template <typename Scalar>
bool is_reversible(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi,
                   Scalar tolerance = Scalar(tol::reversible)) {
  return reversibility_residual(p, pi) <= tolerance;
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

// Tensor product of transition matrices: (tensor m_i)(x,y) = prod m_i(x^i,y^i)
// under the shared flat-index convention (first factor most significant).
template <typename Scalar>
StochasticMatrixT<Scalar> tensor_product(const std::vector<StochasticMatrixT<Scalar>>& ms) {
  require(!ms.empty(), "argument", "tensor product of an empty list");
  Matrix<Scalar> acc = Matrix<Scalar>::Constant(1, 1, Scalar(1));
  std::vector<Index> sizes;
  for (const auto& m : ms) {
    const Index a = acc.rows(), b = m.size();
    Matrix<Scalar> next(a * b, a * b);
    for (Index i = 0; i < a; ++i)
      for (Index j = 0; j < a; ++j)
        next.block(i * b, j * b, b, b) = acc(i, j) * m.rows();
    acc = std::move(next);
    for (Index s : m.space().factor_sizes()) sizes.push_back(s);
  }
  return StochasticMatrixT<Scalar>(ProductStateSpace(std::move(sizes)), std::move(acc));
}

template <typename Scalar>
DistributionT<Scalar> tensor_product(const std::vector<DistributionT<Scalar>>& ds) {
  require(!ds.empty(), "argument", "tensor product of an empty list");
  Vector<Scalar> acc = Vector<Scalar>::Constant(1, Scalar(1));
  std::vector<Index> sizes;
  for (const auto& d : ds) {
    Vector<Scalar> next(acc.size() * d.size());
    for (Index i = 0; i < acc.size(); ++i)
      next.segment(i * d.size(), d.size()) = acc[i] * d.mass();
    acc = std::move(next);
    for (Index s : d.space().factor_sizes()) sizes.push_back(s);
  }
  return DistributionT<Scalar>(ProductStateSpace(std::move(sizes)), std::move(acc));
}

// Product of block chains re-aligned to the coordinate layout of `space`:
// result(x,y) = prod_i blocks[i](x^(S_i), y^(S_i)). The blocks must tile the
// coordinate set. For blocks listed in coordinate order this coincides with
// tensor_product; it differs only by the coordinate permutation otherwise.
template <typename Scalar>
StochasticMatrixT<Scalar> aligned_product(const ProductStateSpace& space,
                                          const std::vector<CoordinateSubset>& subsets,
                                          const std::vector<StochasticMatrixT<Scalar>>& blocks) {
  require(subsets.size() == blocks.size(), "shape_mismatch",
          "one block matrix per coordinate subset required");
  const Index n = space.total();
  Matrix<Scalar> out = Matrix<Scalar>::Constant(n, n, Scalar(1));
  std::vector<char> covered(static_cast<std::size_t>(space.dims()), 0);
  for (std::size_t b = 0; b < subsets.size(); ++b) {
    SubsetIndexMap map(space, subsets[b]);
    require(blocks[b].space() == map.subspace, "shape_mismatch",
            "block matrix does not match the subspace of " + subsets[b].to_string());
    for (Index m : subsets[b].members()) {
      require(!covered[static_cast<std::size_t>(m)], "argument",
              "coordinate " + std::to_string(m + 1) + " appears in two blocks");
      covered[static_cast<std::size_t>(m)] = 1;
    }
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y)
        out(x, y) *= blocks[b](map.sub[static_cast<std::size_t>(x)], map.sub[static_cast<std::size_t>(y)]);
  }
  for (Index i = 0; i < space.dims(); ++i)
    require(covered[static_cast<std::size_t>(i)], "argument",
            "coordinate " + std::to_string(i + 1) + " is not covered by any block");
  return StochasticMatrixT<Scalar>(space, std::move(out));
}

// Unique stationary distribution of an irreducible chain, by a dense linear
// solve of pi (P - I) = 0 with the last balance equation replaced by the
// normalization sum(pi) = 1.
template <typename Scalar>
DistributionT<Scalar> stationary_distribution(const StochasticMatrixT<Scalar>& p) {
  std::pair<Index, Index> witness;
  if (!is_irreducible(p, &witness))
    throw Error("reducible", "state " + std::to_string(witness.second) +
                                 " is unreachable from state " + std::to_string(witness.first));
  const Index n = p.size();
  Matrix<Scalar> a = p.rows().transpose() - Matrix<Scalar>::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector<Scalar> b = Vector<Scalar>::Zero(n);
  b[n - 1] = Scalar(1);
  const auto lu = a.partialPivLu();
  Vector<Scalar> pi = lu.solve(b);
  // One refinement pass keeps the l1 residual at solver noise.
  pi -= lu.solve(a * pi - b);
  return DistributionT<Scalar>(p.space(), std::move(pi));
}

// Time reversal P*(x,y) = pi(y) P(y,x) / pi(x) of a pi-stationary chain.
template <typename Scalar>
StochasticMatrixT<Scalar> time_reversal(const StochasticMatrixT<Scalar>& p,
                                        const DistributionT<Scalar>& pi) {
  require(p.space() == pi.space(), "shape_mismatch", "chain and distribution disagree");
  require(pi.positive(), "non_positive", "time reversal needs a positive distribution");
  const Scalar res = stationarity_residual(p, pi);
  require(res <= Scalar(tol::stationary), "non_stationary",
          "pi is not stationary for P (max residual " + std::to_string(static_cast<double>(res)) + ")");
  Matrix<Scalar> out(p.size(), p.size());
  for (Index x = 0; x < p.size(); ++x)
    for (Index y = 0; y < p.size(); ++y) out(x, y) = pi(y) * p(y, x) / pi(x);
  return StochasticMatrixT<Scalar>(p.space(), std::move(out));
}

// Edge measure (pi ⊠ P)(x,y) = pi(x) P(x,y).
template <typename Scalar>
EdgeMeasureT<Scalar> edge_measure(const DistributionT<Scalar>& pi,
                                  const StochasticMatrixT<Scalar>& p) {
  require(p.space() == pi.space(), "shape_mismatch", "chain and distribution disagree");
  Matrix<Scalar> m = pi.mass().asDiagonal() * p.rows();
  return EdgeMeasureT<Scalar>(p.space(), std::move(m));
}

}  // namespace mcgeo
