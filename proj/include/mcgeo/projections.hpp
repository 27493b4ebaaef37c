#pragma once

#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

#include "mcgeo/divergences.hpp"
#include "mcgeo/markov.hpp"

namespace mcgeo {

// Keep-S-in transition matrix of P with respect to pi:
//   P^(S)(u,v) = sum over the complement block of pi(x) P(x,y) / pi^(S)(u).
// The marginalization runs over the full complement block jointly.
template <typename Scalar>
StochasticMatrixT<Scalar> keep_in(const StochasticMatrixT<Scalar>& p,
                                  const DistributionT<Scalar>& pi, const CoordinateSubset& s) {
  require(p.space() == pi.space(), "shape_mismatch", "chain and distribution disagree");
  require(pi.positive(), "non_positive", "keep-in projection needs a positive distribution");
  require(!s.empty(), "argument", "keep-in subset must be non-empty");
  SubsetIndexMap map(p.space(), s);
  const Index n = p.size(), ns = map.subspace.total();
  Vector<Scalar> margin = Vector<Scalar>::Zero(ns);
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(ns, ns);
  for (Index x = 0; x < n; ++x) {
    const Index u = map.sub[static_cast<std::size_t>(x)];
    margin[u] += pi(x);
    for (Index y = 0; y < n; ++y)
      acc(u, map.sub[static_cast<std::size_t>(y)]) += pi(x) * p(x, y);
  }
  acc.array().colwise() /= margin.array();
  return StochasticMatrixT<Scalar>(map.subspace, std::move(acc));
}

template <typename Scalar>
StochasticMatrixT<Scalar> leave_out(const StochasticMatrixT<Scalar>& p,
                                    const DistributionT<Scalar>& pi, const CoordinateSubset& s) {
  return keep_in(p, pi, s.complement());
}

// i-th marginal transition matrix (keep-{i}-in).
template <typename Scalar>
StochasticMatrixT<Scalar> marginal_chain(const StochasticMatrixT<Scalar>& p,
                                         const DistributionT<Scalar>& pi, Index i) {
  require(i >= 0 && i < p.space().dims(), "argument", "coordinate index out of range");
  return keep_in(p, pi, CoordinateSubset::singleton(p.space().dims(), i));
}

// Result of an information projection onto a factorizable class: the block
// factors, their product re-aligned to the input space, and the divergence
// from the product to the input chain. For per-coordinate factors the aligned
// product equals tensor_product(factors).
template <typename Scalar>
struct ProjectionResultT {
  std::vector<StochasticMatrixT<Scalar>> factors;
  StochasticMatrixT<Scalar> product;
  Scalar divergence_to_input;
};

using ProjectionResult = ProjectionResultT<double>;

// Closest product chain under KL: the tensor product of the marginal chains.
// The returned divergence is the distance to independence of P.
template <typename Scalar>
ProjectionResultT<Scalar> closest_product_kl(const StochasticMatrixT<Scalar>& p,
                                             const DistributionT<Scalar>& pi) {
  const Index d = p.space().dims();
  std::vector<StochasticMatrixT<Scalar>> factors;
  factors.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) factors.push_back(marginal_chain(p, pi, i));
  StochasticMatrixT<Scalar> product = tensor_product(factors);
  const auto div = kl_rate(pi, p, product);
  return ProjectionResultT<Scalar>{std::move(factors), std::move(product), div.as_scalar()};
}

// Distance to independence of P with respect to KL.
template <typename Scalar>
Scalar distance_to_independence(const StochasticMatrixT<Scalar>& p,
                                const DistributionT<Scalar>& pi) {
  return closest_product_kl(p, pi).divergence_to_input;
}

namespace detail {

template <typename Scalar>
const StochasticMatrixT<Scalar>& other_factor(const std::vector<StochasticMatrixT<Scalar>>& others,
                                              Index i, Index j) {
  return others[static_cast<std::size_t>(j < i ? j : j - 1)];
}

// Closed form for the reverse-KL prescribed projection: a weighted geometric
// mean of P entries, evaluated in log space (linear-space products over the
// complement block underflow).
template <typename Scalar>
StochasticMatrixT<Scalar> prescribed_reverse_kl(const StochasticMatrixT<Scalar>& p,
                                                const DistributionT<Scalar>& pi, Index i,
                                                const std::vector<StochasticMatrixT<Scalar>>& others) {
  const ProductStateSpace& space = p.space();
  const Index d = space.dims(), n = space.total();
  SubsetIndexMap map(space, CoordinateSubset::singleton(d, i));
  const Index ni = map.subspace.total();
  std::vector<SubsetIndexMap> omaps;
  for (Index j = 0; j < d; ++j)
    if (j != i) omaps.emplace_back(space, CoordinateSubset::singleton(d, j));

  Matrix<Scalar> norm = Matrix<Scalar>::Zero(ni, ni);
  Matrix<Scalar> logmean = Matrix<Scalar>::Zero(ni, ni);
  for (int pass = 0; pass < 2; ++pass) {
    for (Index x = 0; x < n; ++x) {
      for (Index y = 0; y < n; ++y) {
        Scalar w = pi(x);
        Index slot = 0;
        for (Index j = 0; j < d; ++j) {
          if (j == i) continue;
          const auto& sm = omaps[static_cast<std::size_t>(slot)];
          w *= other_factor(others, i, j)(sm.sub[static_cast<std::size_t>(x)], sm.sub[static_cast<std::size_t>(y)]);
          ++slot;
        }
        if (w == Scalar(0)) continue;
        const Index u = map.sub[static_cast<std::size_t>(x)], v = map.sub[static_cast<std::size_t>(y)];
        if (pass == 0) {
          norm(u, v) += w;
        } else {
          require(p(x, y) > Scalar(0), "domain",
                  "reverse-KL projection needs P > 0 on positively weighted entries; "
                  "P(" + std::to_string(x) + "," + std::to_string(y) + ") = 0");
          logmean(u, v) += w / norm(u, v) * std::log(p(x, y));
        }
      }
    }
  }
  Matrix<Scalar> out(ni, ni);
  for (Index u = 0; u < ni; ++u) {
    const Scalar shift = logmean.row(u).maxCoeff();
    for (Index v = 0; v < ni; ++v) out(u, v) = std::exp(logmean(u, v) - shift);
    out.row(u) /= out.row(u).sum();
  }
  return StochasticMatrixT<Scalar>(map.subspace, std::move(out));
}

template <typename Scalar>
StochasticMatrixT<Scalar> prescribed_alpha(const StochasticMatrixT<Scalar>& p,
                                           const DistributionT<Scalar>& pi, Index i,
                                           const std::vector<StochasticMatrixT<Scalar>>& others,
                                           Scalar a) {
  const ProductStateSpace& space = p.space();
  const Index d = space.dims(), n = space.total();
  SubsetIndexMap map(space, CoordinateSubset::singleton(d, i));
  const Index ni = map.subspace.total();
  std::vector<SubsetIndexMap> omaps;
  for (Index j = 0; j < d; ++j)
    if (j != i) omaps.emplace_back(space, CoordinateSubset::singleton(d, j));

  Matrix<Scalar> acc = Matrix<Scalar>::Zero(ni, ni);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      if (p(x, y) == Scalar(0) && a > Scalar(1)) continue;  // 0^a * anything finite
      Scalar prod = Scalar(1);
      Index slot = 0;
      for (Index j = 0; j < d; ++j) {
        if (j == i) continue;
        const auto& sm = omaps[static_cast<std::size_t>(slot)];
        prod *= other_factor(others, i, j)(sm.sub[static_cast<std::size_t>(x)], sm.sub[static_cast<std::size_t>(y)]);
        ++slot;
      }
      Scalar term;
      if (prod == Scalar(0)) {
        if (a < Scalar(1)) continue;  // 0^(1-a) with positive exponent
        require(p(x, y) == Scalar(0), "domain",
                "alpha > 1 projection undefined: prescribed factor vanishes where P > 0");
        continue;
      } else {
        term = pi(x) * std::pow(prod, Scalar(1) - a) * std::pow(p(x, y), a);
      }
      acc(map.sub[static_cast<std::size_t>(x)], map.sub[static_cast<std::size_t>(y)]) += term;
    }
  }
  Matrix<Scalar> out = acc.array().pow(Scalar(1) / a);
  for (Index u = 0; u < ni; ++u) out.row(u) /= out.row(u).sum();
  return StochasticMatrixT<Scalar>(map.subspace, std::move(out));
}

}  // namespace detail

// Closest product chain factor at coordinate i with the other factors
// prescribed, for the generators with a closed form (KL / reverse KL / alpha).
// `others` lists the prescribed factors in coordinate order, skipping i.
template <typename Scalar>
StochasticMatrixT<Scalar> prescribed_projection(const StochasticMatrixT<Scalar>& p,
                                                const DistributionT<Scalar>& pi, Index i,
                                                const std::vector<StochasticMatrixT<Scalar>>& others,
                                                const DivergenceGeneratorT<Scalar>& f) {
  const Index d = p.space().dims();
  require(i >= 0 && i < d, "argument", "coordinate index out of range");
  require(static_cast<Index>(others.size()) == d - 1, "shape_mismatch",
          "prescribed projection needs exactly d-1 other factors");
  require(pi.positive(), "non_positive", "prescribed projection needs a positive distribution");
  require(p.space() == pi.space(), "shape_mismatch", "chain and distribution disagree");
  for (Index j = 0; j < d; ++j) {
    if (j == i) continue;
    require(detail::other_factor(others, i, j).size() == p.space().factor_size(j),
            "shape_mismatch", "prescribed factor size mismatch at coordinate " + std::to_string(j + 1));
  }
  switch (f.kind()) {
    case DivergenceKind::KL:
      return marginal_chain(p, pi, i);  // independent of the prescribed factors
    case DivergenceKind::ReverseKL:
      return detail::prescribed_reverse_kl(p, pi, i, others);
    case DivergenceKind::Alpha:
      return detail::prescribed_alpha(p, pi, i, others, f.alpha_parameter());
    default:
      throw Error("unsupported", "prescribed projection has no closed form for this generator");
  }
}

template <typename Scalar>
struct CoordinateDescentResultT {
  std::vector<StochasticMatrixT<Scalar>> factors;
  std::vector<Scalar> trace;  // divergence after init and after each coordinate update
  Index sweeps = 0;
  bool converged = false;
};

using CoordinateDescentResult = CoordinateDescentResultT<double>;

// Cyclic coordinate descent over the product-chain factors: coordinate i is
// replaced by its prescribed projection given the freshest other factors.
// The divergence trace is non-increasing; a sweep whose total decrease falls
// below `tolerance` stops the loop. The KL generator lands on the marginal
// chains after a single sweep.
template <typename Scalar>
CoordinateDescentResultT<Scalar> coordinate_descent(
    const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi,
    const DivergenceGeneratorT<Scalar>& f,
    std::optional<std::vector<StochasticMatrixT<std::type_identity_t<Scalar>>>> init = std::nullopt,
    Index max_iters = 500, Scalar tolerance = Scalar(1e-10)) {
  require(f.kind() == DivergenceKind::KL || f.kind() == DivergenceKind::ReverseKL ||
              f.kind() == DivergenceKind::Alpha,
          "unsupported", "coordinate descent supports the KL, reverse-KL and alpha generators");
  const Index d = p.space().dims();
  CoordinateDescentResultT<Scalar> result;
  if (init) {
    require(static_cast<Index>(init->size()) == d, "shape_mismatch",
            "coordinate descent init needs one factor per coordinate");
    result.factors = std::move(*init);
  } else {
    for (Index i = 0; i < d; ++i) {
      const Index ni = p.space().factor_size(i);
      result.factors.emplace_back(ProductStateSpace::single(ni),
                                  Matrix<Scalar>::Constant(ni, ni, Scalar(1) / Scalar(ni)));
    }
  }
  auto objective = [&] {
    return f_div_chains(pi, p, tensor_product(result.factors), f).as_scalar();
  };
  result.trace.push_back(objective());
  for (Index sweep = 0; sweep < max_iters; ++sweep) {
    const Scalar before = result.trace.back();
    for (Index i = 0; i < d; ++i) {
      std::vector<StochasticMatrixT<Scalar>> others;
      others.reserve(static_cast<std::size_t>(d - 1));
      for (Index j = 0; j < d; ++j)
        if (j != i) others.push_back(result.factors[static_cast<std::size_t>(j)]);
      result.factors[static_cast<std::size_t>(i)] = prescribed_projection(p, pi, i, others, f);
      result.trace.push_back(objective());
    }
    ++result.sweeps;
    if (before - result.trace.back() < tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mcgeo
