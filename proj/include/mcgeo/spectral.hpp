#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mcgeo/divergences.hpp"
#include "mcgeo/inequalities.hpp"
#include "mcgeo/markov.hpp"
#include "mcgeo/parallel.hpp"
#include "mcgeo/projections.hpp"
#include "mcgeo/rng.hpp"

namespace mcgeo {

namespace detail {

template <typename Scalar>
void require_reversible(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi,
                        Scalar tolerance = Scalar(1e-9)) {
  require(p.space() == pi.space(), "shape_mismatch", "chain and distribution disagree");
  require(pi.positive(), "non_positive", "reversible spectral theory needs a positive pi");
  const Scalar res = reversibility_residual(p, pi);
  if (res > tolerance) {
    // Report the variational quotient of the additive symmetrization so the
    // caller sees what the Rayleigh quantity would have been.
    Matrix<Scalar> sym = (pi.mass().asDiagonal() * p.rows() +
                          p.rows().transpose() * pi.mass().asDiagonal()) /
                         Scalar(2);
    Matrix<Scalar> half = pi.mass().array().sqrt().matrix().asDiagonal().inverse() * sym *
                          pi.mass().array().sqrt().matrix().asDiagonal().inverse();
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(half);
    const Scalar quotient = Scalar(1) - es.eigenvalues()[p.size() - 2];
    throw Error("non_reversible",
                "detailed balance residual " + std::to_string(static_cast<double>(res)) +
                    " exceeds tolerance; variational quotient of the additive "
                    "symmetrization (not a right spectral gap) = " +
                    std::to_string(static_cast<double>(quotient)));
  }
}

// Eigendecomposition of the pi-symmetrized transition matrix
// D^{1/2} P D^{-1/2}; eigenvalues ascending.
template <typename Scalar>
Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> symmetrized_eigen(
    const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  Vector<Scalar> root = pi.mass().array().sqrt();
  Matrix<Scalar> s = root.asDiagonal() * p.rows() * root.cwiseInverse().asDiagonal();
  s = (s + s.transpose()) / Scalar(2);
  return Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(s);
}

template <typename Scalar>
Scalar dirichlet_form(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi,
                      const Vector<Scalar>& f) {
  Scalar acc = 0;
  for (Index x = 0; x < p.size(); ++x)
    for (Index y = 0; y < p.size(); ++y) {
      const Scalar diff = f[x] - f[y];
      acc += pi(x) * p(x, y) * diff * diff;
    }
  return acc / Scalar(2);
}

}  // namespace detail

// Right spectral gap gamma = 1 - lambda_2 of a reversible irreducible chain.
// Periodic chains are accepted: the right gap only involves the second
// largest eigenvalue, not the spectral radius of the negative end.
template <typename Scalar>
Scalar spectral_gap(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  require(p.size() >= 2, "argument", "the spectral gap needs at least two states");
  detail::require_reversible(p, pi);
  std::pair<Index, Index> witness;
  if (!is_irreducible(p, &witness))
    throw Error("reducible", "state " + std::to_string(witness.second) +
                                 " is unreachable from state " + std::to_string(witness.first));
  auto es = detail::symmetrized_eigen(p, pi);
  return Scalar(1) - es.eigenvalues()[p.size() - 2];
}

template <typename Scalar>
struct LogSobolevBracketT {
  Scalar lower;    // certified classical lower bound
  Scalar upper;    // gamma / 2
  Scalar numeric;  // refined estimate, clipped into [lower, upper]
};

using LogSobolevBracket = LogSobolevBracketT<double>;

// Certified bracket for the log-Sobolev constant plus a numeric refinement.
// The exact constant is a non-convex infimum, so only the bracket is sound:
//   upper = gamma/2,  lower = gamma (1-2 pi*) / ln(1/pi* - 1),
// with the two-point uniform limit lower = gamma/2 when pi* = 1/2. The
// numeric value is a seeded projected-gradient minimization of
// Dirichlet/Ent(f^2) over the unit pi-sphere, seeded along the spectral-gap
// eigenvector (near-constant test functions approach the product-chain
// optimum) and clipped into the bracket.
template <typename Scalar>
LogSobolevBracketT<Scalar> log_sobolev_bracket(const StochasticMatrixT<Scalar>& p,
                                               const DistributionT<Scalar>& pi) {
  const Scalar gamma = spectral_gap(p, pi);
  const Scalar pistar = pi.mass().minCoeff();
  LogSobolevBracketT<Scalar> out;
  out.upper = gamma / Scalar(2);
  out.lower = pistar >= Scalar(0.5) - Scalar(1e-12)
                  ? gamma / Scalar(2)
                  : gamma * (Scalar(1) - Scalar(2) * pistar) /
                        std::log(Scalar(1) / pistar - Scalar(1));

  const Index n = p.size();
  auto es = detail::symmetrized_eigen(p, pi);
  Vector<Scalar> v2 = pi.mass().array().sqrt().inverse() * es.eigenvectors().col(n - 2).array();

  auto pi_norm = [&](const Vector<Scalar>& f) { return std::sqrt(f.cwiseProduct(f).dot(pi.mass())); };
  auto entropy2 = [&](const Vector<Scalar>& f) {
    Scalar acc = 0;
    const Scalar mean = f.cwiseProduct(f).dot(pi.mass());
    for (Index x = 0; x < n; ++x) {
      const Scalar f2 = f[x] * f[x];
      if (f2 > Scalar(0)) acc += pi(x) * f2 * std::log(f2 / mean);
    }
    return acc;
  };

  Matrix<Scalar> lap = pi.mass().asDiagonal() * (Matrix<Scalar>::Identity(n, n) - p.rows());
  lap = (lap + lap.transpose()) / Scalar(2);

  SplitMix64 gen(0x6c735f6d63u);  // fixed seed: the refinement is deterministic
  Scalar best = out.upper;
  const int restarts = 32;
  for (int r = 0; r < restarts; ++r) {
    Vector<Scalar> f(n);
    if (r < 4) {
      const Scalar eps[] = {0.5, 0.2, 0.08, 0.02};
      f = Vector<Scalar>::Ones(n) + eps[r] / pi_norm(v2) * v2;
    } else {
      for (Index x = 0; x < n; ++x) f[x] = Scalar(2) * Scalar(gen.next_double()) - Scalar(1);
    }
    f /= pi_norm(f);
    Scalar step = Scalar(0.1);
    for (int it = 0; it < 400 && step > Scalar(1e-12); ++it) {
      const Scalar num = f.dot(lap * f);
      const Scalar den = entropy2(f);
      if (den < Scalar(1e-13)) break;
      const Scalar q = num / den;
      Vector<Scalar> gnum = Scalar(2) * (lap * f);
      Vector<Scalar> gden(n);
      const Scalar mean = f.cwiseProduct(f).dot(pi.mass());
      for (Index x = 0; x < n; ++x) {
        const Scalar f2 = f[x] * f[x];
        gden[x] = f2 > Scalar(0) ? Scalar(2) * pi(x) * f[x] * std::log(f2 / mean) : Scalar(0);
      }
      Vector<Scalar> grad = (gnum * den - num * gden) / (den * den);
      grad -= grad.cwiseProduct(pi.mass()).dot(f) * f;  // tangent of the pi-sphere
      Vector<Scalar> cand = f - step * grad;
      cand /= pi_norm(cand);
      const Scalar cden = entropy2(cand);
      if (cden > Scalar(1e-13) && cand.dot(lap * cand) / cden <= q) {
        f = cand;
        step *= Scalar(1.05);
      } else {
        step /= Scalar(2);
      }
    }
    const Scalar den = entropy2(f);
    if (den > Scalar(1e-13)) best = std::min(best, f.dot(lap * f) / den);
  }
  out.numeric = std::min(std::max(best, out.lower), out.upper);
  return out;
}

// Bottleneck scan: min over subsets A with 0 < pi(A) <= 1/2 of the escape
// flow (pi x P)(A, A^c) / pi(A). Pure min-cut quantity with no structural
// gate; enumerates subsets in Gray-code order with incremental cut updates.
template <typename Scalar>
Scalar cheeger_scan(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  const Index n = p.size();
  require(n >= 2, "argument", "the bottleneck scan needs at least two states");
  require(n <= 22, "size_guard",
          "the bottleneck scan is exhaustive over 2^" + std::to_string(n) +
              " subsets; refusing beyond 22 states");
  Matrix<Scalar> flow = pi.mass().asDiagonal() * p.rows();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  Scalar cut = 0, mass = 0;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const std::uint64_t count = std::uint64_t(1) << n;
  std::uint64_t gray_prev = 0;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t delta = gray ^ gray_prev;
    gray_prev = gray;
    Index bit = 0;
    while (!(delta >> bit & 1u)) ++bit;
    if (!in[static_cast<std::size_t>(bit)]) {
      // bit joins A: edges to current A stop being cut, others start
      mass += pi(bit);
      for (Index j = 0; j < n; ++j) {
        if (j == bit) continue;
        if (in[static_cast<std::size_t>(j)])
          cut -= flow(j, bit);
        else
          cut += flow(bit, j);
      }
      in[static_cast<std::size_t>(bit)] = 1;
    } else {
      mass -= pi(bit);
      for (Index j = 0; j < n; ++j) {
        if (j == bit) continue;
        if (in[static_cast<std::size_t>(j)])
          cut += flow(j, bit);
        else
          cut -= flow(bit, j);
      }
      in[static_cast<std::size_t>(bit)] = 0;
    }
    if (mass > Scalar(0) && mass <= Scalar(0.5) + Scalar(1e-15))
      best = std::min(best, cut / mass);
  }
  return best;
}

// Cheeger constant of an ergodic chain (irreducible and aperiodic; a
// period-2 flip dynamics is rejected even though the scan itself is defined).
template <typename Scalar>
Scalar cheeger_constant(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi) {
  require(pi.positive(), "non_positive", "the Cheeger constant needs a positive pi");
  require(is_irreducible(p), "reducible", "the Cheeger constant needs an irreducible chain");
  require(period(p) == 1, "non_ergodic",
          "the Cheeger constant needs an aperiodic chain (period " +
              std::to_string(period(p)) + ")");
  return cheeger_scan(p, pi);
}

template <typename Scalar>
struct HittingReportT {
  Matrix<Scalar> hit;      // E_x tau_y, zero diagonal
  Matrix<Scalar> commute;  // hit + hit^T
  Scalar t_c;              // max commute entry
  Scalar t_av;             // sum_xy pi(x) pi(y) E_x tau_y
};

using HittingReport = HittingReportT<double>;

// Expected hitting times by one dense solve per target column, plus the
// variational lower bound self-check at the maximal-commute pair (reversible
// chains only): admissible test functions never exceed the commute time.
template <typename Scalar>
HittingReportT<Scalar> hitting_analysis(const StochasticMatrixT<Scalar>& p,
                                        const DistributionT<Scalar>& pi) {
  std::pair<Index, Index> witness;
  if (!is_irreducible(p, &witness))
    throw Error("reducible", "hitting times diverge: state " + std::to_string(witness.second) +
                                 " is unreachable from state " + std::to_string(witness.first));
  const Index n = p.size();
  HittingReportT<Scalar> report;
  report.hit = Matrix<Scalar>::Zero(n, n);
  parallel_for(n, [&](Index y) {
    Matrix<Scalar> a(n - 1, n - 1);
    for (Index r = 0, ri = 0; r < n; ++r) {
      if (r == y) continue;
      for (Index c = 0, ci = 0; c < n; ++c) {
        if (c == y) continue;
        a(ri, ci) = (r == c ? Scalar(1) : Scalar(0)) - p(r, c);
        ++ci;
      }
      ++ri;
    }
    Vector<Scalar> h = a.partialPivLu().solve(Vector<Scalar>::Ones(n - 1));
    for (Index r = 0, ri = 0; r < n; ++r) {
      if (r == y) continue;
      report.hit(r, y) = h[ri++];
    }
  });
  report.commute = report.hit + report.hit.transpose();
  Index bx = 0, by = 0;
  report.t_c = report.commute.maxCoeff(&bx, &by);
  report.t_av = pi.mass().transpose() * report.hit * pi.mass();

  if (is_reversible(p, pi, Scalar(1e-9)) && bx != by) {
    SplitMix64 gen(0x68697474u);
    for (int trial = 0; trial < 50; ++trial) {
      Vector<Scalar> f(n);
      for (Index i = 0; i < n; ++i) f[i] = Scalar(gen.next_double());
      f[bx] = Scalar(1);
      f[by] = Scalar(0);
      const Scalar d = detail::dirichlet_form(p, pi, f);
      if (d > Scalar(0) && Scalar(1) / d > report.commute(bx, by) + Scalar(1e-8))
        throw Error("internal", "variational commute-time lower bound violated");
    }
  }
  return report;
}

// Heat kernel e^{t(P-I)} by scaling and squaring of the truncated series.
template <typename Scalar>
StochasticMatrixT<Scalar> heat_kernel(const StochasticMatrixT<Scalar>& p, Scalar t) {
  require(t >= Scalar(0), "argument", "heat kernel time must be non-negative");
  const Index n = p.size();
  Matrix<Scalar> a = t * (p.rows() - Matrix<Scalar>::Identity(n, n));
  int squarings = 0;
  Scalar norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > Scalar(0.5)) {
    a /= Scalar(2);
    norm /= Scalar(2);
    ++squarings;
  }
  Matrix<Scalar> result = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> term = Matrix<Scalar>::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * a / Scalar(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < Scalar(1e-19)) break;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return StochasticMatrixT<Scalar>(p.space(), std::move(result));
}

// Reversible path: exact modal form through the symmetrized eigensystem.
template <typename Scalar>
StochasticMatrixT<Scalar> heat_kernel(const StochasticMatrixT<Scalar>& p,
                                      const DistributionT<Scalar>& pi, Scalar t) {
  require(t >= Scalar(0), "argument", "heat kernel time must be non-negative");
  detail::require_reversible(p, pi);
  auto es = detail::symmetrized_eigen(p, pi);
  Vector<Scalar> decay = ((es.eigenvalues().array() - Scalar(1)) * t).exp();
  Vector<Scalar> root = pi.mass().array().sqrt();
  Matrix<Scalar> m = root.cwiseInverse().asDiagonal() * es.eigenvectors() * decay.asDiagonal() *
                     es.eigenvectors().transpose() * root.asDiagonal();
  return StochasticMatrixT<Scalar>(p.space(), std::move(m));
}

// Worst-case L2 mixing time of the continuized chain:
//   inf{ t : max_x sqrt( sum_y pi(y) (H_t(x,y)/pi(y) - 1)^2 ) < eps }.
// Found by doubling then bisection to 1e-9 in t (well inside the 1e-6
// contract). The continuized chain is ergodic for any irreducible P, so
// periodic discrete-time inputs are fine.
template <typename Scalar>
Scalar l2_mixing_time(const StochasticMatrixT<Scalar>& p, const DistributionT<Scalar>& pi,
                      Scalar eps) {
  require(eps > Scalar(0), "argument", "mixing threshold must be positive");
  detail::require_reversible(p, pi);
  require(is_irreducible(p), "reducible", "mixing requires an irreducible chain");
  const Index n = p.size();
  auto es = detail::symmetrized_eigen(p, pi);
  // Modal form: dist(t, x)^2 = sum_{k != top} e^{2 t (lambda_k - 1)} u_k(x)^2 / pi(x).
  Index top = 0;
  es.eigenvalues().maxCoeff(&top);
  auto dist = [&](Scalar t) {
    Scalar worst = 0;
    for (Index x = 0; x < n; ++x) {
      Scalar acc = 0;
      for (Index k = 0; k < n; ++k) {
        if (k == top) continue;
        const Scalar u = es.eigenvectors()(x, k);
        acc += std::exp(Scalar(2) * t * (es.eigenvalues()[k] - Scalar(1))) * u * u;
      }
      worst = std::max(worst, acc / pi(x));
    }
    return std::sqrt(worst);
  };
  if (dist(Scalar(0)) < eps) return Scalar(0);
  Scalar hi = Scalar(1);
  while (dist(hi) >= eps) hi *= Scalar(2);
  Scalar lo = hi > Scalar(1) ? hi / Scalar(2) : Scalar(0);
  while (hi - lo > Scalar(1e-9)) {
    const Scalar mid = (lo + hi) / Scalar(2);
    (dist(mid) < eps ? hi : lo) = mid;
  }
  return hi;
}

template <typename Scalar>
struct SpectralReportT {
  Scalar gamma;
  LogSobolevBracketT<Scalar> alpha;
  std::optional<Scalar> cheeger;
  Scalar t_rel;
};

using SpectralReport = SpectralReportT<double>;

template <typename Scalar>
SpectralReportT<Scalar> spectral_report(const StochasticMatrixT<Scalar>& p,
                                        const DistributionT<Scalar>& pi,
                                        bool want_cheeger = false) {
  SpectralReportT<Scalar> report;
  report.gamma = spectral_gap(p, pi);
  report.alpha = log_sobolev_bracket(p, pi);
  report.t_rel = Scalar(1) / report.gamma;
  if (want_cheeger) report.cheeger = cheeger_constant(p, pi);
  return report;
}

template <typename Scalar>
struct ContractionLevelT {
  std::string label;
  Scalar gamma;
  LogSobolevBracketT<Scalar> alpha;
  std::optional<Scalar> phi;
  Scalar t_c;
  Scalar t_av;
  Scalar ind;      // distance to independence
  Scalar d_to_pi;  // D(P || Pi)
};

template <typename Scalar>
struct ContractionReportT {
  std::vector<ContractionLevelT<Scalar>> levels;  // full chain, then S, then T
  bool gamma_chain;
  bool phi_chain;  // asserted only when every level has a Cheeger value
  bool tc_chain;
  bool tav_chain;
  bool ind_chain;
  bool dpi_chain;
  bool alpha_numeric_chain;  // advisory: numeric refinements, 1e-3 slack
  std::optional<Scalar> tensor_gap;  // gamma(P^(S) x P^(-S)) for lazy P
  bool tensor_gap_holds;
  bool all_asserted_hold;
};

using ContractionReport = ContractionReportT<double>;

// Contraction of hitting and mixing parameters under projections along a
// chain of subsets T <= S: gamma and Phi grow, commute/average hitting times
// and both KL functionals shrink. The log-Sobolev comparison is reported at
// the bracket level and checked only through the numeric refinement, with a
// loose advisory tolerance (the inner minimization is non-convex).
template <typename Scalar>
ContractionReportT<Scalar> contraction_report(const StochasticMatrixT<Scalar>& p,
                                              const DistributionT<Scalar>& pi,
                                              const CoordinateSubset& s,
                                              const CoordinateSubset& t) {
  require(!t.empty() && t.subset_of(s), "argument",
          "contraction needs non-empty T contained in S");
  detail::require_reversible(p, pi);
  const auto pi_full = DistributionT<Scalar>(pi);
  auto make_level = [&](const std::string& label, const StochasticMatrixT<Scalar>& q,
                        const DistributionT<Scalar>& mu) {
    ContractionLevelT<Scalar> level;
    level.label = label;
    level.gamma = spectral_gap(q, mu);
    level.alpha = log_sobolev_bracket(q, mu);
    level.phi = (q.size() <= 22 && is_ergodic(q)) ? std::optional<Scalar>(cheeger_scan(q, mu))
                                                  : std::nullopt;
    const auto hits = hitting_analysis(q, mu);
    level.t_c = hits.t_c;
    level.t_av = hits.t_av;
    level.ind = distance_to_independence(q, mu);
    level.d_to_pi = kl_rate(mu, q, StochasticMatrixT<Scalar>::constant_rows(mu)).as_scalar();
    return level;
  };

  ContractionReportT<Scalar> report;
  report.levels.push_back(make_level("full", p, pi_full));
  const auto ps = keep_in(p, pi, s);
  const auto pis = pi.marginal(s);
  report.levels.push_back(make_level(s.to_string(), ps, pis));
  const auto pt = keep_in(p, pi, t);
  const auto pit = pi.marginal(t);
  report.levels.push_back(make_level(t.to_string(), pt, pit));

  const Scalar tl = Scalar(tol::identity);
  auto increasing = [&](auto get) {
    return get(report.levels[0]) <= get(report.levels[1]) + tl &&
           get(report.levels[1]) <= get(report.levels[2]) + tl;
  };
  auto decreasing = [&](auto get) {
    return get(report.levels[0]) >= get(report.levels[1]) - tl &&
           get(report.levels[1]) >= get(report.levels[2]) - tl;
  };
  report.gamma_chain = increasing([](const auto& l) { return l.gamma; });
  report.phi_chain = report.levels[0].phi && report.levels[1].phi && report.levels[2].phi &&
                     *report.levels[0].phi <= *report.levels[1].phi + tl &&
                     *report.levels[1].phi <= *report.levels[2].phi + tl;
  report.tc_chain = decreasing([](const auto& l) { return l.t_c; });
  report.tav_chain = decreasing([](const auto& l) { return l.t_av; });
  report.ind_chain = decreasing([](const auto& l) { return l.ind; });
  report.dpi_chain = decreasing([](const auto& l) { return l.d_to_pi; });
  report.alpha_numeric_chain =
      report.levels[0].alpha.numeric <= report.levels[1].alpha.numeric + Scalar(1e-3) &&
      report.levels[1].alpha.numeric <= report.levels[2].alpha.numeric + Scalar(1e-3);

  report.tensor_gap_holds = true;
  if (p.lazy()) {
    const auto comp = s.complement();
    if (!comp.empty()) {
      const auto pc = keep_in(p, pi, comp);
      const auto pic = pi.marginal(comp);
      const auto prod = aligned_product<Scalar>(p.space(), {s, comp}, {ps, pc});
      std::vector<DistributionT<Scalar>> margins{pis, pic};
      Vector<Scalar> mass(p.size());
      SubsetIndexMap ms(p.space(), s), mc(p.space(), comp);
      for (Index x = 0; x < p.size(); ++x)
        mass[x] = pis(ms.sub[static_cast<std::size_t>(x)]) * pic(mc.sub[static_cast<std::size_t>(x)]);
      DistributionT<Scalar> prod_pi(p.space(), std::move(mass));
      report.tensor_gap = spectral_gap(prod, prod_pi);
      report.tensor_gap_holds = report.levels[0].gamma <= *report.tensor_gap + tl;
    }
  }
  report.all_asserted_hold = report.gamma_chain && report.tc_chain && report.tav_chain &&
                             report.ind_chain && report.dpi_chain && report.tensor_gap_holds;
  // Phi joins the asserted set only when present at every level.
  if (report.levels[0].phi && report.levels[1].phi && report.levels[2].phi)
    report.all_asserted_hold = report.all_asserted_hold && report.phi_chain;
  return report;
}

}  // namespace mcgeo
