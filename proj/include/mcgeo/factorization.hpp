#pragma once

#include <vector>

#include "mcgeo/projections.hpp"

namespace mcgeo {

// Mutually exclusive partition of the coordinate set into non-empty blocks.
class Partition {
 public:
  Partition(Index d, std::vector<CoordinateSubset> blocks)
      : d_(d), blocks_(std::move(blocks)) {
    std::vector<char> covered(static_cast<std::size_t>(d), 0);
    for (const auto& b : blocks_) {
      require(!b.empty(), "argument", "partition blocks must be non-empty");
      require(b.dims() == d, "argument", "partition block over the wrong coordinate count");
      for (Index m : b.members()) {
        require(!covered[static_cast<std::size_t>(m)], "argument",
                "coordinate " + std::to_string(m + 1) + " appears in two partition blocks");
        covered[static_cast<std::size_t>(m)] = 1;
      }
    }
    for (Index i = 0; i < d; ++i)
      require(covered[static_cast<std::size_t>(i)], "argument",
              "coordinate " + std::to_string(i + 1) + " is missing from the partition");
  }

  static Partition singletons(Index d) {
    std::vector<CoordinateSubset> blocks;
    for (Index i = 0; i < d; ++i) blocks.push_back(CoordinateSubset::singleton(d, i));
    return Partition(d, std::move(blocks));
  }

  Index dims() const { return d_; }
  const std::vector<CoordinateSubset>& blocks() const { return blocks_; }

 private:
  Index d_;
  std::vector<CoordinateSubset> blocks_;
};

// Cliques of an undirected graph on the coordinate set, jointly covering it;
// overlaps are allowed. Every listed set must induce a complete subgraph.
class CliqueCover {
 public:
  CliqueCover(Matrix<bool> adjacency, std::vector<CoordinateSubset> cliques)
      : adjacency_(std::move(adjacency)), cliques_(std::move(cliques)) {
    const Index d = adjacency_.rows();
    require(adjacency_.cols() == d, "argument", "adjacency matrix must be square");
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        require(adjacency_(i, j) == adjacency_(j, i), "argument",
                "adjacency matrix must be symmetric");
    std::vector<char> covered(static_cast<std::size_t>(d), 0);
    for (const auto& c : cliques_) {
      require(!c.empty(), "argument", "cliques must be non-empty");
      require(c.dims() == d, "argument", "clique over the wrong coordinate count");
      const auto& m = c.members();
      for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
          require(adjacency_(m[a], m[b]), "argument",
                  "set " + c.to_string() + " is not a clique: vertices " +
                      std::to_string(m[a] + 1) + " and " + std::to_string(m[b] + 1) +
                      " are not adjacent");
      for (Index v : m) covered[static_cast<std::size_t>(v)] = 1;
    }
    for (Index i = 0; i < d; ++i)
      require(covered[static_cast<std::size_t>(i)], "argument",
              "coordinate " + std::to_string(i + 1) + " is not covered by any clique");
  }

  Index dims() const { return adjacency_.rows(); }
  const std::vector<CoordinateSubset>& cliques() const { return cliques_; }

 private:
  Matrix<bool> adjacency_;
  std::vector<CoordinateSubset> cliques_;
};

// Projection onto the partition-factorizable chains: tensor product of the
// keep-block-in matrices, with the KL distance to the input.
template <typename Scalar>
ProjectionResultT<Scalar> partition_projection(const StochasticMatrixT<Scalar>& p,
                                               const DistributionT<Scalar>& pi,
                                               const Partition& part) {
  require(part.dims() == p.space().dims(), "shape_mismatch",
          "partition does not match the state space");
  std::vector<StochasticMatrixT<Scalar>> factors;
  factors.reserve(part.blocks().size());
  for (const auto& block : part.blocks()) factors.push_back(keep_in(p, pi, block));
  StochasticMatrixT<Scalar> product = aligned_product(p.space(), part.blocks(), factors);
  const auto div = kl_rate(pi, p, product);
  return ProjectionResultT<Scalar>{std::move(factors), std::move(product), div.as_scalar()};
}

template <typename Scalar>
struct IndependenceDecompositionT {
  Scalar total;                  // distance to independence of P
  Scalar to_factorizability;     // distance to the block-factorizable class
  std::vector<Scalar> per_block; // distance to independence of each block chain
};

using IndependenceDecomposition = IndependenceDecompositionT<double>;

// Split of the distance to independence: total = to_factorizability + sum of
// the per-block distances to independence.
template <typename Scalar>
IndependenceDecompositionT<Scalar> independence_decomposition(const StochasticMatrixT<Scalar>& p,
                                                              const DistributionT<Scalar>& pi,
                                                              const Partition& part) {
  IndependenceDecompositionT<Scalar> out;
  out.total = distance_to_independence(p, pi);
  auto proj = partition_projection(p, pi, part);
  out.to_factorizability = proj.divergence_to_input;
  for (std::size_t b = 0; b < part.blocks().size(); ++b) {
    const auto margin = pi.marginal(part.blocks()[b]);
    out.per_block.push_back(distance_to_independence(proj.factors[b], margin));
  }
  return out;
}

template <typename Scalar>
struct CliqueCandidateT {
  StochasticMatrixT<Scalar> matrix;
  Vector<Scalar> normalizers;  // Z(x): row sums of the raw clique product
};

using CliqueCandidate = CliqueCandidateT<double>;

namespace detail {

// Raw clique product A(x,y) = prod_i blocks[i](x^(C_i), y^(C_i)) and its row
// normalizers, over possibly overlapping cliques.
template <typename Scalar>
std::pair<Matrix<Scalar>, Vector<Scalar>> clique_product(
    const ProductStateSpace& space, const std::vector<CoordinateSubset>& cliques,
    const std::vector<StochasticMatrixT<Scalar>>& blocks) {
  const Index n = space.total();
  Matrix<Scalar> a = Matrix<Scalar>::Constant(n, n, Scalar(1));
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    SubsetIndexMap map(space, cliques[c]);
    require(blocks[c].space() == map.subspace, "shape_mismatch",
            "clique factor does not match the subspace of " + cliques[c].to_string());
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y)
        a(x, y) *= blocks[c](map.sub[static_cast<std::size_t>(x)], map.sub[static_cast<std::size_t>(y)]);
  }
  Vector<Scalar> z = a.rowwise().sum();
  return {std::move(a), std::move(z)};
}

}  // namespace detail

// Row-normalized product of the keep-clique-in projections. The normalizers
// Z(x) are recorded; a vanishing Z(x) is a hard error naming the state.
template <typename Scalar>
CliqueCandidateT<Scalar> clique_candidate(const StochasticMatrixT<Scalar>& p,
                                          const DistributionT<Scalar>& pi,
                                          const CliqueCover& cover) {
  require(cover.dims() == p.space().dims(), "shape_mismatch",
          "clique cover does not match the state space");
  std::vector<StochasticMatrixT<Scalar>> blocks;
  blocks.reserve(cover.cliques().size());
  for (const auto& c : cover.cliques()) blocks.push_back(keep_in(p, pi, c));
  auto [a, z] = detail::clique_product(p.space(), cover.cliques(), blocks);
  for (Index x = 0; x < z.size(); ++x)
    require(z[x] > Scalar(0), "zero_normalizer",
            "clique product row " + std::to_string(x) + " has zero mass");
  a.array().colwise() /= z.array();
  return CliqueCandidateT<Scalar>{StochasticMatrixT<Scalar>(p.space(), std::move(a)), std::move(z)};
}

template <typename Scalar>
struct CliquePythagoreanReportT {
  Scalar lhs;                      // D(P || M)
  Scalar rhs;                      // D(P || P_bold) + sum_i D(P^(C_i) || L_i)
  Scalar projection_term;          // D(P || P_bold)
  std::vector<Scalar> block_terms; // D(P^(C_i) || L_i)
  Scalar slack;                    // lhs - rhs
  std::vector<char> z_ok;          // per-state Z-dominance verdict
  Scalar z_margin_min;             // min over x of Z_L(x) - Z_P(x)
  bool z_condition_all;
  bool asserted;                   // inequality claimed only under full Z-dominance
  bool holds;                      // slack >= -1e-10 (meaningful when asserted)
};

using CliquePythagoreanReport = CliquePythagoreanReportT<double>;

// Conditional Pythagorean inequality for clique-factorizable candidates: the
// bound is claimed only when the candidate normalizers dominate those of the
// clique projection at every state; otherwise both sides are still reported.
template <typename Scalar>
CliquePythagoreanReportT<Scalar> clique_pythagorean_check(
    const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi, const CliqueCover& cover,
    const std::vector<StochasticMatrixT<Scalar>>& candidate_blocks) {
  require(candidate_blocks.size() == cover.cliques().size(), "shape_mismatch",
          "one candidate factor per clique required");
  auto projection = clique_candidate(p, pi, cover);
  auto [raw, z_cand] = detail::clique_product(p.space(), cover.cliques(), candidate_blocks);
  for (Index x = 0; x < z_cand.size(); ++x)
    require(z_cand[x] > Scalar(0), "zero_normalizer",
            "candidate clique product row " + std::to_string(x) + " has zero mass");
  raw.array().colwise() /= z_cand.array();
  StochasticMatrixT<Scalar> m(p.space(), std::move(raw));

  CliquePythagoreanReportT<Scalar> report;
  report.lhs = kl_rate(pi, p, m).as_scalar();
  report.projection_term = kl_rate(pi, p, projection.matrix).as_scalar();
  report.rhs = report.projection_term;
  for (std::size_t c = 0; c < cover.cliques().size(); ++c) {
    const auto margin = pi.marginal(cover.cliques()[c]);
    const auto block = keep_in(p, pi, cover.cliques()[c]);
    report.block_terms.push_back(kl_rate(margin, block, candidate_blocks[c]).as_scalar());
    report.rhs += report.block_terms.back();
  }
  report.slack = report.lhs - report.rhs;
  report.z_margin_min = std::numeric_limits<Scalar>::infinity();
  report.z_condition_all = true;
  for (Index x = 0; x < z_cand.size(); ++x) {
    const Scalar margin = z_cand[x] - projection.normalizers[x];
    report.z_ok.push_back(margin >= Scalar(-1e-12) ? 1 : 0);
    report.z_margin_min = std::min(report.z_margin_min, margin);
    if (!report.z_ok.back()) report.z_condition_all = false;
  }
  report.asserted = report.z_condition_all;
  report.holds = report.slack >= Scalar(-tol::identity);
  return report;
}

}  // namespace mcgeo
