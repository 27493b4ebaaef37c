#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "mcgeo/extended_real.hpp"
#include "mcgeo/markov.hpp"

namespace mcgeo {

enum class DivergenceKind { KL, ReverseKL, Alpha, SquaredHellinger, Custom };

// Convex generator f with f(1) = 0, together with its boundary data: the
// limit f(0+) and f'(+inf) = lim_{x->0+} x f(1/x). Presets carry these
// analytically; custom generators must supply them (no numerical limits).
template <typename Scalar>
class DivergenceGeneratorT {
 public:
  static DivergenceGeneratorT kl() {
    return DivergenceGeneratorT(DivergenceKind::KL, [](Scalar t) { return t * std::log(t); },
                                ExtendedT<Scalar>(Scalar(0)), ExtendedT<Scalar>::infinity());
  }

  static DivergenceGeneratorT reverse_kl() {
    return DivergenceGeneratorT(DivergenceKind::ReverseKL, [](Scalar t) { return -std::log(t); },
                                ExtendedT<Scalar>::infinity(), ExtendedT<Scalar>(Scalar(0)));
  }

  static DivergenceGeneratorT alpha(Scalar a) {
    require(a > Scalar(0) && a != Scalar(1), "argument",
            "alpha must lie in (0,1) or (1,inf)");
    auto f = [a](Scalar t) { return (std::pow(t, a) - Scalar(1)) / (a - Scalar(1)); };
    ExtendedT<Scalar> fpinf =
        a < Scalar(1) ? ExtendedT<Scalar>(Scalar(0)) : ExtendedT<Scalar>::infinity();
    DivergenceGeneratorT g(DivergenceKind::Alpha, f,
                           ExtendedT<Scalar>(Scalar(1) / (Scalar(1) - a)), fpinf);
    g.alpha_ = a;
    return g;
  }

  static DivergenceGeneratorT squared_hellinger() {
    auto f = [](Scalar t) {
      const Scalar s = std::sqrt(t) - Scalar(1);
      return s * s;
    };
    return DivergenceGeneratorT(DivergenceKind::SquaredHellinger, f,
                                ExtendedT<Scalar>(Scalar(1)), ExtendedT<Scalar>(Scalar(1)));
  }

  static DivergenceGeneratorT custom(std::function<Scalar(Scalar)> f,
                                     ExtendedT<Scalar> f_at_zero,
                                     ExtendedT<Scalar> f_prime_at_inf) {
    return DivergenceGeneratorT(DivergenceKind::Custom, std::move(f), f_at_zero, f_prime_at_inf);
  }

  DivergenceKind kind() const { return kind_; }
  Scalar alpha_parameter() const { return alpha_; }
  Scalar operator()(Scalar t) const { return f_(t); }
  const ExtendedT<Scalar>& f_at_zero() const { return f_at_zero_; }
  const ExtendedT<Scalar>& f_prime_at_inf() const { return f_prime_at_inf_; }

 private:
  DivergenceGeneratorT(DivergenceKind kind, std::function<Scalar(Scalar)> f,
                       ExtendedT<Scalar> f0, ExtendedT<Scalar> fpinf)
      : kind_(kind), f_(std::move(f)), f_at_zero_(f0), f_prime_at_inf_(fpinf) {
    require(std::abs(f_(Scalar(1))) <= Scalar(1e-12), "argument", "generator must satisfy f(1) = 0");
    // Midpoint convexity spot-check on a fixed grid over (0,10]^2.
    for (int i = 1; i <= 20; ++i)
      for (int j = i; j <= 20; ++j) {
        const Scalar a = Scalar(i) / Scalar(2), b = Scalar(j) / Scalar(2);
        require(f_((a + b) / 2) <= (f_(a) + f_(b)) / 2 + Scalar(1e-12), "argument",
                "generator fails midpoint convexity at (" + std::to_string(double(a)) + "," +
                    std::to_string(double(b)) + ")");
      }
  }

  DivergenceKind kind_;
  std::function<Scalar(Scalar)> f_;
  ExtendedT<Scalar> f_at_zero_;
  ExtendedT<Scalar> f_prime_at_inf_;
  Scalar alpha_ = Scalar(0);
};

using DivergenceGenerator = DivergenceGeneratorT<double>;

namespace detail {

// One term nu * f(mu/nu) with the conventions 0 f(0/0) = 0 and
// 0 f(a/0) = a f'(+inf). Zero-denominator cases dispatch before any division.
template <typename Scalar>
ExtendedT<Scalar> fdiv_term(Scalar mu, Scalar nu, const DivergenceGeneratorT<Scalar>& f) {
  if (nu > Scalar(0)) {
    if (mu > Scalar(0)) return ExtendedT<Scalar>(nu * f(mu / nu));
    return weighted(nu, f.f_at_zero());
  }
  if (mu == Scalar(0)) return ExtendedT<Scalar>(Scalar(0));
  return weighted(mu, f.f_prime_at_inf());
}

template <typename Scalar, typename RowA, typename RowB>
ExtendedT<Scalar> fdiv_rows(const RowA& mu, const RowB& nu, const DivergenceGeneratorT<Scalar>& f) {
  ExtendedT<Scalar> acc(Scalar(0));
  for (Index y = 0; y < mu.size(); ++y) {
    acc += fdiv_term<Scalar>(mu[y], nu[y], f);
    if (acc.is_infinite()) return acc;
  }
  return acc;
}

}  // namespace detail

// f-divergence between probability masses: sum_x nu(x) f(mu(x)/nu(x)).
template <typename Scalar>
ExtendedT<Scalar> f_div_measures(const DistributionT<Scalar>& mu, const DistributionT<Scalar>& nu,
                                 const DivergenceGeneratorT<Scalar>& f) {
  require(mu.space() == nu.space(), "shape_mismatch", "measures live on different spaces");
  return detail::fdiv_rows<Scalar>(mu.mass(), nu.mass(), f);
}

// f-divergence from chain L to chain M with respect to pi:
//   sum_x pi(x) sum_y L(x,y) f(M(x,y)/L(x,y)),
// the pi-weighted average of the row-wise measure divergences. Rows with
// pi(x) = 0 contribute nothing (0 * inf = 0).
template <typename Scalar>
ExtendedT<Scalar> f_div_chains(const DistributionT<Scalar>& pi, const StochasticMatrixT<Scalar>& m,
                               const StochasticMatrixT<Scalar>& l,
                               const DivergenceGeneratorT<Scalar>& f) {
  require(pi.space() == m.space() && pi.space() == l.space(), "shape_mismatch",
          "pi, M and L must share one state space");
  ExtendedT<Scalar> acc(Scalar(0));
  for (Index x = 0; x < pi.size(); ++x) {
    if (pi(x) == Scalar(0)) continue;
    const auto row = detail::fdiv_rows<Scalar>(m.rows().row(x), l.rows().row(x), f);
    acc += weighted(pi(x), row);
    if (acc.is_infinite()) return acc;
  }
  return acc;
}

// KL divergence rate from L to M with respect to pi.
template <typename Scalar>
ExtendedT<Scalar> kl_rate(const DistributionT<Scalar>& pi, const StochasticMatrixT<Scalar>& m,
                          const StochasticMatrixT<Scalar>& l) {
  return f_div_chains(pi, m, l, DivergenceGeneratorT<Scalar>::kl());
}

}  // namespace mcgeo
