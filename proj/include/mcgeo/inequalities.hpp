#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mcgeo/factorization.hpp"
#include "mcgeo/projections.hpp"

namespace mcgeo {

// Family (S_i) of coordinate subsets in which every coordinate appears at
// least r times (the covering multiplicity of Shearer-type bounds).
class SubsetCoverSpec {
 public:
  SubsetCoverSpec(Index d, std::vector<CoordinateSubset> subsets, Index r)
      : d_(d), subsets_(std::move(subsets)), r_(r) {
    require(r_ >= 1, "argument", "covering multiplicity must be positive");
    std::vector<Index> count(static_cast<std::size_t>(d), 0);
    for (const auto& s : subsets_) {
      require(s.dims() == d, "argument", "subset over the wrong coordinate count");
      for (Index m : s.members()) ++count[static_cast<std::size_t>(m)];
    }
    for (Index i = 0; i < d; ++i)
      require(count[static_cast<std::size_t>(i)] >= r_, "argument",
              "coordinate " + std::to_string(i + 1) + " is covered only " +
                  std::to_string(count[static_cast<std::size_t>(i)]) + " < r times");
  }

  // Leave-one-out family S_i = {1..d} \ {i} with r = d-1 (Han configuration).
  static SubsetCoverSpec han(Index d) {
    require(d >= 2, "argument", "the leave-one-out cover needs d >= 2");
    std::vector<CoordinateSubset> subsets;
    for (Index i = 0; i < d; ++i)
      subsets.push_back(CoordinateSubset::singleton(d, i).complement());
    return SubsetCoverSpec(d, std::move(subsets), d - 1);
  }

  Index dims() const { return d_; }
  Index multiplicity() const { return r_; }
  const std::vector<CoordinateSubset>& subsets() const { return subsets_; }

 private:
  Index d_;
  std::vector<CoordinateSubset> subsets_;
  Index r_;
};

template <typename Scalar>
struct InequalityReportT {
  ExtendedT<Scalar> lhs;
  ExtendedT<Scalar> rhs;
  Scalar slack_value;  // lhs - rhs, with inf - inf collapsed to 0
  bool holds;          // slack >= -1e-10

  InequalityReportT(ExtendedT<Scalar> l, ExtendedT<Scalar> r)
      : lhs(l), rhs(r), slack_value(slack(l, r)), holds(slack_value >= Scalar(-tol::identity)) {}
};

using InequalityReport = InequalityReportT<double>;

// Product structure test for a distribution: pi equals the tensor product of
// its own coordinate marginals.
template <typename Scalar>
bool is_product_distribution(const DistributionT<Scalar>& pi, Scalar tolerance = Scalar(1e-12)) {
  const Index d = pi.space().dims();
  std::vector<DistributionT<Scalar>> marginals;
  for (Index i = 0; i < d; ++i)
    marginals.push_back(pi.marginal(CoordinateSubset::singleton(d, i)));
  const auto prod = tensor_product(marginals);
  return (pi.mass() - prod.mass()).template lpNorm<Eigen::Infinity>() <= tolerance;
}

// Partition lemma: D(P||L) >= D(P^(S) || L^(S)) for any non-empty S, any pi.
template <typename Scalar>
InequalityReportT<Scalar> partition_lemma_check(const DistributionT<Scalar>& pi,
                                                const StochasticMatrixT<Scalar>& p,
                                                const StochasticMatrixT<Scalar>& l,
                                                const CoordinateSubset& s) {
  require(!s.empty(), "argument", "partition lemma needs a non-empty subset");
  const auto lhs = kl_rate(pi, p, l);
  const auto margin = pi.marginal(s);
  const auto rhs = kl_rate(margin, keep_in(p, pi, s), keep_in(l, pi, s));
  return InequalityReportT<Scalar>(lhs, rhs);
}

// Shearer bound for chains: with a positive product pi and L = tensor(L_j),
//   D(P || L) >= (1/r) sum_i D(P^(S_i) || tensor_{j in S_i} L_j).
template <typename Scalar>
InequalityReportT<Scalar> shearer_chain_check(const DistributionT<Scalar>& pi,
                                              const StochasticMatrixT<Scalar>& p,
                                              const std::vector<StochasticMatrixT<Scalar>>& l_factors,
                                              const SubsetCoverSpec& cover) {
  const Index d = pi.space().dims();
  require(cover.dims() == d, "shape_mismatch", "cover does not match the state space");
  require(static_cast<Index>(l_factors.size()) == d, "shape_mismatch",
          "one factor matrix per coordinate required");
  require(pi.positive(), "non_positive", "Shearer bound needs a positive distribution");
  require(is_product_distribution(pi), "not_product",
          "Shearer bound needs a product distribution");
  const auto lhs = kl_rate(pi, p, tensor_product(l_factors));
  ExtendedT<Scalar> sum(Scalar(0));
  for (const auto& s : cover.subsets()) {
    std::vector<StochasticMatrixT<Scalar>> sub;
    for (Index j : s.members()) sub.push_back(l_factors[static_cast<std::size_t>(j)]);
    const auto margin = pi.marginal(s);
    sum += kl_rate(margin, keep_in(p, pi, s), tensor_product(sub));
  }
  const auto rhs = weighted(Scalar(1) / Scalar(cover.multiplicity()), sum);
  return InequalityReportT<Scalar>(lhs, rhs);
}

// Shearer bound for the distance to independence:
//   I(P) >= (1/r) sum_i I(P^(S_i)).
template <typename Scalar>
InequalityReportT<Scalar> shearer_independence_check(const DistributionT<Scalar>& pi,
                                                     const StochasticMatrixT<Scalar>& p,
                                                     const SubsetCoverSpec& cover) {
  require(cover.dims() == pi.space().dims(), "shape_mismatch",
          "cover does not match the state space");
  require(pi.positive(), "non_positive", "Shearer bound needs a positive distribution");
  require(is_product_distribution(pi), "not_product",
          "Shearer bound needs a product distribution");
  const Scalar lhs = distance_to_independence(p, pi);
  Scalar sum = 0;
  for (const auto& s : cover.subsets())
    sum += distance_to_independence(keep_in(p, pi, s), pi.marginal(s));
  return InequalityReportT<Scalar>(ExtendedT<Scalar>(lhs),
                                   ExtendedT<Scalar>(sum / Scalar(cover.multiplicity())));
}

// Shannon entropy rate of a stationary chain: H = -sum_x pi(x) sum_y P ln P.
template <typename Scalar>
Scalar entropy_rate(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  Scalar h = 0;
  for (Index x = 0; x < p.size(); ++x) {
    if (pi(x) == Scalar(0)) continue;
    Scalar row = 0;
    for (Index y = 0; y < p.size(); ++y)
      if (p(x, y) > Scalar(0)) row -= p(x, y) * std::log(p(x, y));
    h += pi(x) * row;
  }
  return h;
}

template <typename Scalar>
Scalar entropy_rate(const StochasticMatrixT<Scalar>& p) {
  return entropy_rate(p, stationary_distribution(p));
}

enum class ScanFunctional { EntropyRate, FactorizabilityDistance, DistanceToIndependence };

template <typename Scalar>
struct ModularityScanReportT {
  ScanFunctional functional;
  Index triple_count = 0;          // (S, T, i) triples inspected
  Scalar min_modularity_slack = std::numeric_limits<Scalar>::infinity();
  unsigned argmin_s = 0, argmin_t = 0;
  Index argmin_i = -1;
  Scalar min_monotonicity_slack = std::numeric_limits<Scalar>::infinity();  // independence only
  Scalar max_identity_residual = 0;  // functional-specific decomposition identity
  bool holds = false;
};

using ModularityScanReport = ModularityScanReportT<double>;

// Exhaustive (sub/super)modularity scan of a set function of coordinate
// subsets, with g evaluated from keep-in projections of a stationary chain:
//   EntropyRate:             g(S) = H(P^(S))              (submodular)
//   FactorizabilityDistance: g(S) = D(P || P^(S) x P^(-S)) (submodular)
//   DistanceToIndependence:  g(S) = I(P^(S))  (supermodular, non-decreasing)
// Every triple S <= T <= [d]\{i} is checked; empty subsets score 0.
template <typename Scalar>
ModularityScanReportT<Scalar> modularity_scan(const StochasticMatrixT<Scalar>& p,
                                              ScanFunctional functional) {
  const Index d = p.space().dims();
  const Index triples = [&] {
    Index c = 0;
    for (unsigned t = 0; t < (1u << d); ++t)
      for (Index i = 0; i < d; ++i)
        if (!(t >> i & 1u)) c += Index(1) << __builtin_popcount(t);
    return c;
  }();
  require(d <= 5, "size_guard",
          "modularity scan is exhaustive; d = " + std::to_string(d) + " gives " +
              std::to_string(triples) + " triples (limit d <= 5)");
  const auto pi = stationary_distribution(p);

  const unsigned full = (1u << d) - 1u;
  std::vector<Scalar> g(full + 1, Scalar(0));
  std::vector<Scalar> ent(full + 1, Scalar(0));  // entropy rates, reused by identities
  for (unsigned mask = 1; mask <= full; ++mask) {
    const auto s = CoordinateSubset::from_mask(d, mask);
    const auto ps = keep_in(p, pi, s);
    const auto ms = pi.marginal(s);
    ent[mask] = entropy_rate(ps, ms);
    switch (functional) {
      case ScanFunctional::EntropyRate:
        g[mask] = ent[mask];
        break;
      case ScanFunctional::FactorizabilityDistance: {
        if (mask == full) {
          g[mask] = Scalar(0);
        } else {
          const auto comp = s.complement();
          const auto prod = aligned_product<Scalar>(p.space(), {s, comp},
                                                    {ps, keep_in(p, pi, comp)});
          g[mask] = kl_rate(pi, p, prod).as_scalar();
        }
        break;
      }
      case ScanFunctional::DistanceToIndependence:
        g[mask] = distance_to_independence(ps, ms);
        break;
    }
  }

  ModularityScanReportT<Scalar> report;
  report.functional = functional;
  report.triple_count = triples;
  const Scalar sign = functional == ScanFunctional::DistanceToIndependence ? Scalar(-1) : Scalar(1);
  for (Index i = 0; i < d; ++i) {
    const unsigned rest = full & ~(1u << i);
    for (unsigned t = rest;; t = (t - 1) & rest) {
      for (unsigned s = t;; s = (s - 1) & t) {
        // submodularity slack g(S+i) - g(S) - g(T+i) + g(T), sign-flipped for
        // the supermodular functional
        const Scalar sl = sign * (g[s | (1u << i)] - g[s] - g[t | (1u << i)] + g[t]);
        if (sl < report.min_modularity_slack) {
          report.min_modularity_slack = sl;
          report.argmin_s = s;
          report.argmin_t = t;
          report.argmin_i = i;
        }
        if (s == 0) break;
      }
      if (t == 0) break;
    }
  }
  if (functional == ScanFunctional::DistanceToIndependence) {
    for (unsigned t = 0; t <= full; ++t)
      for (unsigned s = t;; s = (s - 1) & t) {
        report.min_monotonicity_slack = std::min(report.min_monotonicity_slack, g[t] - g[s]);
        if (s == 0) break;
      }
  }
  // Identity residuals tying the functionals to the entropy rates.
  for (unsigned mask = 1; mask <= full; ++mask) {
    Scalar expected = 0;
    switch (functional) {
      case ScanFunctional::EntropyRate:
        continue;
      case ScanFunctional::FactorizabilityDistance:
        if (mask == full) continue;
        expected = ent[mask] + ent[full & ~mask] - ent[full];
        break;
      case ScanFunctional::DistanceToIndependence: {
        expected = -ent[mask];
        for (Index i = 0; i < d; ++i)
          if (mask >> i & 1u) expected += ent[1u << i];
        break;
      }
    }
    report.max_identity_residual =
        std::max(report.max_identity_residual, std::abs(g[mask] - expected));
  }
  report.holds = report.min_modularity_slack >= Scalar(-tol::identity) &&
                 (functional != ScanFunctional::DistanceToIndependence ||
                  report.min_monotonicity_slack >= Scalar(-tol::identity)) &&
                 report.max_identity_residual <= Scalar(tol::identity);
  return report;
}

// Pair empirical measure of a trajectory, closed cyclically:
//   E_n = (1/n) (sum_{i<n} delta_(X_i, X_{i+1}) + delta_(X_n, X_1)).
// Both marginals coincide by construction.
template <typename Scalar>
EdgeMeasureT<Scalar> pair_empirical_measure(const ProductStateSpace& space,
                                            const std::vector<Index>& trajectory) {
  require(!trajectory.empty(), "argument", "trajectory must be non-empty");
  const Index n = space.total();
  for (Index x : trajectory)
    require(x >= 0 && x < n, "argument", "trajectory state out of range");
  Matrix<Scalar> mass = Matrix<Scalar>::Zero(n, n);
  const Scalar w = Scalar(1) / Scalar(trajectory.size());
  for (std::size_t i = 0; i + 1 < trajectory.size(); ++i)
    mass(trajectory[i], trajectory[i + 1]) += w;
  mass(trajectory.back(), trajectory.front()) += w;
  return EdgeMeasureT<Scalar>(space, std::move(mass));
}

// Large-deviation rate exponent for the event that the pair empirical measure
// looks like a product chain with the prescribed factors: the reverse-KL
// divergence from the optimal prescribed-marginal product to P.
template <typename Scalar>
Scalar sanov_rate(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi, Index i,
                  const std::vector<StochasticMatrixT<Scalar>>& others) {
  require(p.rows().minCoeff() > Scalar(0), "domain",
          "the reverse-KL closed form needs an entrywise positive P");
  require(pi.positive() && is_product_distribution(pi), "not_product",
          "the rate exponent needs a positive product distribution");
  const auto rkl = DivergenceGeneratorT<Scalar>::reverse_kl();
  const auto star = prescribed_projection(p, pi, i, others, rkl);
  const Index d = p.space().dims();
  std::vector<StochasticMatrixT<Scalar>> all;
  for (Index j = 0; j < d; ++j)
    all.push_back(j == i ? star : detail::other_factor(others, i, j));
  return f_div_chains(pi, p, tensor_product(all), rkl).as_scalar();
}

}  // namespace mcgeo
