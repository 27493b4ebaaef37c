#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mcgeo/markov.hpp"
#include "mcgeo/projections.hpp"
#include "mcgeo/rng.hpp"
#include "mcgeo/spectral.hpp"

namespace mcgeo {

// Simple random walk on the hypercube {0,1}^N: pick a coordinate uniformly
// and flip it. Symmetric, hence reversible for the uniform distribution;
// period 2 (the right spectral gap is still 2/N).
template <typename Scalar>
StochasticMatrixT<Scalar> hypercube_flip_walk(Index n_bits) {
  const auto space = ProductStateSpace::hypercube(n_bits);
  const Index n = space.total();
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index b = 0; b < n_bits; ++b) m(x, x ^ (Index(1) << b)) = Scalar(1) / Scalar(n_bits);
  return StochasticMatrixT<Scalar>(space, std::move(m));
}

// Configuration of the d-temperature swapping chain: an energy over the base
// space, a strictly increasing inverse-temperature ladder starting at
// beta_1 >= 0, and a base proposal chain that is reversible for the uniform
// distribution (i.e. symmetric).
template <typename Scalar>
struct SwapConfigT {
  ProductStateSpace base_space;
  Vector<Scalar> energy;
  std::vector<Scalar> betas;
  StochasticMatrixT<Scalar> base_chain;

  SwapConfigT(ProductStateSpace space, Vector<Scalar> h, std::vector<Scalar> b,
              StochasticMatrixT<Scalar> p0)
      : base_space(std::move(space)), energy(std::move(h)), betas(std::move(b)),
        base_chain(std::move(p0)) {
    require(energy.size() == base_space.total(), "shape_mismatch",
            "energy vector does not match the base space");
    require(base_chain.space().total() == base_space.total(), "shape_mismatch",
            "base chain does not match the base space");
    require(betas.size() >= 2, "argument", "the swapping chain needs d >= 2 temperatures");
    require(betas.front() >= Scalar(0), "argument", "inverse temperatures must be non-negative");
    for (std::size_t i = 1; i < betas.size(); ++i)
      require(betas[i] > betas[i - 1], "argument", "inverse temperatures must strictly increase");
    const Scalar sym = (base_chain.rows() - base_chain.rows().transpose())
                           .template lpNorm<Eigen::Infinity>();
    require(sym <= Scalar(tol::reversible), "argument",
            "base chain must be reversible for the uniform distribution (symmetric)");
  }

  Index d() const { return static_cast<Index>(betas.size()); }

  // Number of hypercube bits, when the base space is a hypercube.
  Index hypercube_bits() const {
    for (Index s : base_space.factor_sizes())
      require(s == 2, "argument", "base space is not a hypercube");
    return base_space.dims();
  }

  Scalar oscillation() const { return energy.maxCoeff() - energy.minCoeff(); }
};

using SwapConfig = SwapConfigT<double>;

// Boltzmann-Gibbs distributions along the ladder, pi_i ∝ e^{-beta_i H}.
template <typename Scalar>
struct GibbsLadderT {
  std::vector<DistributionT<Scalar>> dists;
};

using GibbsLadder = GibbsLadderT<double>;

template <typename Scalar>
DistributionT<Scalar> gibbs_distribution(const ProductStateSpace& space,
                                         const Vector<Scalar>& energy, Scalar beta) {
  Vector<Scalar> w = (-(energy.array() - energy.minCoeff()) * beta).exp();
  return DistributionT<Scalar>(space, w / w.sum());
}

template <typename Scalar>
GibbsLadderT<Scalar> gibbs_ladder(const SwapConfigT<Scalar>& cfg) {
  GibbsLadderT<Scalar> ladder;
  for (Scalar beta : cfg.betas)
    ladder.dists.push_back(gibbs_distribution(cfg.base_space, cfg.energy, beta));
  return ladder;
}

// State space of the swapping chain: d copies of the base space, each copy a
// single factor (one temperature slot per coordinate).
template <typename Scalar>
ProductStateSpace swap_space(const SwapConfigT<Scalar>& cfg) {
  return ProductStateSpace(std::vector<Index>(static_cast<std::size_t>(cfg.d()),
                                              cfg.base_space.total()));
}

template <typename Scalar>
DistributionT<Scalar> swap_stationary(const SwapConfigT<Scalar>& cfg) {
  return tensor_product(gibbs_ladder(cfg).dists).reshaped(swap_space(cfg));
}

// Metropolis chain for pi_beta with the symmetric proposal P0.
template <typename Scalar>
StochasticMatrixT<Scalar> metropolis_level(const SwapConfigT<Scalar>& cfg, Index level) {
  const Scalar beta = cfg.betas[static_cast<std::size_t>(level)];
  const Index n = cfg.base_space.total();
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    Scalar off = 0;
    for (Index y = 0; y < n; ++y) {
      if (y == x) continue;
      const Scalar acc = std::min(Scalar(1), std::exp(-beta * (cfg.energy[y] - cfg.energy[x])));
      m(x, y) = cfg.base_chain(x, y) * acc;
      off += m(x, y);
    }
    m(x, x) = Scalar(1) - off;
  }
  return StochasticMatrixT<Scalar>(cfg.base_space, std::move(m));
}

namespace detail {

template <typename Scalar>
void check_swap_size(const SwapConfigT<Scalar>& cfg) {
  double total = 1;
  for (Index i = 0; i < cfg.d(); ++i) total *= static_cast<double>(cfg.base_space.total());
  require(total <= 65536.0, "size_guard",
          "swapping chain would have " + std::to_string(total) + " states (limit 2^16)");
}

}  // namespace detail

// Transition matrix of the swapping chain. One step is, with probability 1/2,
// a level move (temperature slot i uniform over d, Metropolis at beta_i) and,
// with probability 1/2, a swap move (adjacent pair i uniform over d-1,
// exchanging the two states with acceptance min{1, pi_sw(swapped)/pi_sw(x)}).
// Off-diagonal swap entries are exactly
//   1/(2(d-1)) e^{-(beta_{i+1}-beta_i)(H(x_i)-H(x_{i+1}))_+},
// rejected mass sits on the diagonal, and the chain is reversible for the
// product of the ladder distributions.
template <typename Scalar>
StochasticMatrixT<Scalar> build_swapping_matrix(const SwapConfigT<Scalar>& cfg) {
  detail::check_swap_size(cfg);
  const Index d = cfg.d(), nb = cfg.base_space.total();
  const auto space = swap_space(cfg);
  const Index n = space.total();
  std::vector<StochasticMatrixT<Scalar>> levels;
  for (Index i = 0; i < d; ++i) levels.push_back(metropolis_level(cfg, i));

  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  const Scalar level_w = Scalar(1) / Scalar(2 * d);
  const Scalar swap_w = Scalar(1) / Scalar(2 * (d - 1));
  std::vector<Index> multi(static_cast<std::size_t>(d));
  for (Index x = 0; x < n; ++x) {
    auto mx = space.unindex(x);
    Scalar off = 0;
    for (Index i = 0; i < d; ++i) {
      const auto& li = levels[static_cast<std::size_t>(i)];
      for (Index yi = 0; yi < nb; ++yi) {
        if (yi == mx[static_cast<std::size_t>(i)]) continue;
        multi = mx;
        multi[static_cast<std::size_t>(i)] = yi;
        const Scalar w = level_w * li(mx[static_cast<std::size_t>(i)], yi);
        m(x, space.flat_index(multi)) += w;
        off += w;
      }
    }
    for (Index i = 0; i + 1 < d; ++i) {
      const Index a = mx[static_cast<std::size_t>(i)], b = mx[static_cast<std::size_t>(i + 1)];
      if (a == b) continue;  // swap is the identity; mass stays diagonal
      multi = mx;
      std::swap(multi[static_cast<std::size_t>(i)], multi[static_cast<std::size_t>(i + 1)]);
      const Scalar gap_beta = cfg.betas[static_cast<std::size_t>(i + 1)] - cfg.betas[static_cast<std::size_t>(i)];
      const Scalar acc = std::exp(-gap_beta * std::max(cfg.energy[a] - cfg.energy[b], Scalar(0)));
      const Scalar w = swap_w * acc;
      m(x, space.flat_index(multi)) += w;
      off += w;
    }
    m(x, x) += Scalar(1) - off;
  }
  return StochasticMatrixT<Scalar>(space, std::move(m));
}

// Restriction of the swapping chain to the block with coordinates 2..d fixed:
// off-block moves fold into self-loops. With beta_1 = 0 this equals
// (1/2d) P0 + (1 - 1/2d) I independently of the fixed block.
template <typename Scalar>
StochasticMatrixT<Scalar> restriction_chain(const SwapConfigT<Scalar>& cfg, Index fixed_block) {
  const auto psw = build_swapping_matrix(cfg);
  const Index nb = cfg.base_space.total();
  Index block_count = 1;
  for (Index i = 1; i < cfg.d(); ++i) block_count *= nb;
  require(fixed_block >= 0 && fixed_block < block_count, "argument",
          "fixed block index out of range");
  Matrix<Scalar> r = Matrix<Scalar>::Zero(nb, nb);
  for (Index y = 0; y < nb; ++y) {
    Scalar off = 0;
    for (Index z = 0; z < nb; ++z) {
      if (z == y) continue;
      r(y, z) = psw(y * block_count + fixed_block, z * block_count + fixed_block);
      off += r(y, z);
    }
    r(y, y) = Scalar(1) - off;
  }
  return StochasticMatrixT<Scalar>(cfg.base_space, std::move(r));
}

// Escape parameter: the maximal one-step probability of leaving a block of
// the partition {X x {x^(-1)}}, by exhaustive scan over blocks and states.
template <typename Scalar>
Scalar gamma_escape(const StochasticMatrixT<Scalar>& psw, Index base_total, Index d) {
  Index block_count = 1;
  for (Index i = 1; i < d; ++i) block_count *= base_total;
  Scalar best = 0;
  for (Index block = 0; block < block_count; ++block)
    for (Index y = 0; y < base_total; ++y) {
      Scalar stay = 0;
      for (Index z = 0; z < base_total; ++z) stay += psw(y * block_count + block, z * block_count + block);
      best = std::max(best, Scalar(1) - stay);
    }
  return best;
}

template <typename Scalar>
Scalar gamma_escape(const SwapConfigT<Scalar>& cfg) {
  return gamma_escape(build_swapping_matrix(cfg), cfg.base_space.total(), cfg.d());
}

// Projection sampler in matrix form: the keep-{2..d}-in chain of the
// swapping chain, i.e. the transition matrix of "resample the hottest
// coordinate at stationarity, then take one swapping step".
template <typename Scalar>
StochasticMatrixT<Scalar> projection_sampler_matrix(const SwapConfigT<Scalar>& cfg) {
  const auto psw = build_swapping_matrix(cfg);
  const auto pisw = swap_stationary(cfg);
  std::vector<Index> rest;
  for (Index i = 1; i < cfg.d(); ++i) rest.push_back(i);
  return keep_in(psw, pisw, CoordinateSubset(cfg.d(), rest));
}

template <typename Scalar>
struct SamplerRunT {
  std::uint64_t seed;
  Index steps;
  Index coordinate;                   // tallied temperature slot (0-based)
  DistributionT<Scalar> empirical;    // over the base space
  std::vector<Index> trajectory;      // flat swap states, when recorded
};

using SamplerRun = SamplerRunT<double>;

// Trajectory simulator for the projection sampler. Per step the draws are
// consumed from one SplitMix64 stream in this order:
//   1. u: resample coordinate 1 from the hottest ladder distribution
//      (inverse CDF);
//   2. u: move type (level if u < 1/2, else swap);
//   3. level branch: index i (one integer draw), proposal from the P0 row
//      (inverse CDF), acceptance u vs the Metropolis ratio at beta_i;
//      swap branch: index i (one integer draw), acceptance u vs the swap
//      ratio.
// Runs are bit-reproducible for a given (seed, steps, config).
template <typename Scalar>
SamplerRunT<Scalar> simulate_projection_sampler(const SwapConfigT<Scalar>& cfg, std::uint64_t seed,
                                                Index steps, Index coordinate = -1,
                                                bool record_trajectory = false) {
  require(steps >= 1, "argument", "simulation needs at least one step");
  const Index d = cfg.d(), nb = cfg.base_space.total();
  if (coordinate < 0) coordinate = d - 1;
  require(coordinate >= 0 && coordinate < d, "argument", "tallied coordinate out of range");
  const auto ladder = gibbs_ladder(cfg);

  Vector<Scalar> hot_cdf(nb);
  Scalar acc = 0;
  for (Index x = 0; x < nb; ++x) hot_cdf[x] = (acc += ladder.dists[0](x));
  Matrix<Scalar> base_cdf(nb, nb);
  for (Index x = 0; x < nb; ++x) {
    Scalar c = 0;
    for (Index y = 0; y < nb; ++y) base_cdf(x, y) = (c += cfg.base_chain(x, y));
  }
  auto inverse_cdf = [nb](const auto& row, Scalar u) {
    Index lo = 0, hi = nb - 1;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (row[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };

  SplitMix64 gen(seed);
  std::vector<Index> x(static_cast<std::size_t>(d), 0);
  Vector<Scalar> counts = Vector<Scalar>::Zero(nb);
  const auto space = swap_space(cfg);
  SamplerRunT<Scalar> run{seed, steps, coordinate,
                          DistributionT<Scalar>::uniform(cfg.base_space), {}};
  if (record_trajectory) run.trajectory.reserve(static_cast<std::size_t>(steps));
  for (Index s = 0; s < steps; ++s) {
    x[0] = inverse_cdf(hot_cdf, Scalar(gen.next_double()));
    if (gen.next_double() < 0.5) {
      const Index i = static_cast<Index>(gen.next_below(static_cast<std::uint64_t>(d)));
      const Index y = inverse_cdf(base_cdf.row(x[static_cast<std::size_t>(i)]),
                                  Scalar(gen.next_double()));
      const Scalar dh = cfg.energy[y] - cfg.energy[x[static_cast<std::size_t>(i)]];
      if (Scalar(gen.next_double()) <
          std::min(Scalar(1), std::exp(-cfg.betas[static_cast<std::size_t>(i)] * dh)))
        x[static_cast<std::size_t>(i)] = y;
    } else {
      const Index i = static_cast<Index>(gen.next_below(static_cast<std::uint64_t>(d - 1)));
      const Scalar a = cfg.energy[x[static_cast<std::size_t>(i)]];
      const Scalar b = cfg.energy[x[static_cast<std::size_t>(i + 1)]];
      const Scalar gap_beta =
          cfg.betas[static_cast<std::size_t>(i + 1)] - cfg.betas[static_cast<std::size_t>(i)];
      if (Scalar(gen.next_double()) < std::exp(-gap_beta * std::max(a - b, Scalar(0))))
        std::swap(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i + 1)]);
    }
    counts[x[static_cast<std::size_t>(coordinate)]] += Scalar(1);
    if (record_trajectory) run.trajectory.push_back(space.flat_index(x));
  }
  run.empirical = DistributionT<Scalar>(cfg.base_space, counts / Scalar(steps));
  return run;
}

template <typename Scalar>
struct SpeedupReportT {
  Index n_bits = 0;
  Index d = 0;
  std::vector<Scalar> betas;
  Scalar oscillation = 0;

  Scalar gamma_p0 = 0;
  LogSobolevBracketT<Scalar> alpha_p0{};
  Scalar gamma_sw = 0;
  LogSobolevBracketT<Scalar> alpha_sw{};
  Scalar gamma_proj = 0;
  LogSobolevBracketT<Scalar> alpha_proj{};

  Scalar escape = 0;                   // measured Gamma
  Scalar escape_formula = 0;           // 1 - 1/(2d) - (d-2)/(2(d-1))
  Scalar restriction_residual = 0;     // vs (1/2d) P0 + (1-1/2d) I
  Scalar gamma_restriction = 0;
  Scalar gamma_restriction_residual = 0;  // vs (1/2d) gamma(P0)

  // asserted claims (theorems / exact constants)
  bool restriction_exact = false;
  bool gamma_restriction_exact = false;
  bool escape_ok = false;              // d=2: == 3/4; d>2: within [formula, 1]
  bool contraction_holds = false;      // gamma_sw <= gamma_proj
  Scalar relax_le_lhs = 0, relax_le_rhs = 0;  // 1/gamma_sw <= d(N+1) + 3 Gh d(N+1)/gamma_proj
  bool relax_le_holds = false;
  Scalar decomposition_lower = 0;      // min{g/3, g*gmin/(3*Gamma+g)} with g = gamma_proj
  bool decomposition_lower_holds = false;
  Scalar tmix_proj = 0;
  Scalar tmix_proj_bound = 0;          // (4 + ln(beta Osc + N ln 2)) / alpha_lower(proj)
  bool tmix_upper_holds = false;
  bool all_asserted_hold = false;

  // recorded claims (evaluated, not asserted; see the discrepancy notes)
  Scalar threefold_lhs = 0, threefold_rhs = 0;  // gamma_sw vs gamma_proj / 3
  bool threefold_holds = false;
  Scalar equality_gamma_lhs = 0, equality_gamma_rhs = 0, equality_gamma_residual = 0;  // d = 2
  Scalar equality_alpha_lhs = 0, equality_alpha_rhs = 0, equality_alpha_residual = 0;  // numeric
  Scalar relax_ge_lhs = 0, relax_ge_rhs = 0;
  bool relax_ge_holds = false;
  std::optional<Scalar> tmix_sw;

  // displayed-constant discrepancy notes
  Scalar gamma_p0_display = 0;   // the quoted 2/(N+1) convention
  Scalar alpha_p0_display = 0;   // the quoted 1/(N+1) convention
  Scalar alpha_gamma_ratio_p0 = 0;
  std::vector<std::string> notes;
};

using SpeedupReport = SpeedupReportT<double>;

// Full comparison of the swapping chain against its projection sampler on a
// hypercube base. Exact constants and decomposition-sound inequalities are
// asserted; the equality-form and reversed-inequality displays are evaluated
// and recorded with their residuals since they fail numerically (see notes).
template <typename Scalar>
SpeedupReportT<Scalar> speedup_report(const SwapConfigT<Scalar>& cfg) {
  SpeedupReportT<Scalar> rep;
  rep.n_bits = cfg.hypercube_bits();
  rep.d = cfg.d();
  rep.betas = cfg.betas;
  rep.oscillation = cfg.oscillation();
  const Index d = cfg.d(), nb = cfg.base_space.total();
  const Scalar npl = Scalar(rep.n_bits + 1);

  const auto uniform = DistributionT<Scalar>::uniform(cfg.base_space);
  rep.gamma_p0 = spectral_gap(cfg.base_chain, uniform);
  rep.alpha_p0 = log_sobolev_bracket(cfg.base_chain, uniform);
  rep.alpha_gamma_ratio_p0 = rep.alpha_p0.numeric / rep.gamma_p0;
  rep.gamma_p0_display = Scalar(2) / npl;
  rep.alpha_p0_display = Scalar(1) / npl;

  const auto psw = build_swapping_matrix(cfg);
  const auto pisw = swap_stationary(cfg);
  rep.gamma_sw = spectral_gap(psw, pisw);
  rep.alpha_sw = log_sobolev_bracket(psw, pisw);

  std::vector<Index> rest;
  for (Index i = 1; i < d; ++i) rest.push_back(i);
  const auto proj = keep_in(psw, pisw, CoordinateSubset(d, rest));
  const auto piproj = pisw.marginal(CoordinateSubset(d, rest));
  rep.gamma_proj = spectral_gap(proj, piproj);
  rep.alpha_proj = log_sobolev_bracket(proj, piproj);

  rep.escape = gamma_escape(psw, nb, d);
  rep.escape_formula =
      Scalar(1) - Scalar(1) / Scalar(2 * d) - Scalar(d - 2) / Scalar(2 * (d - 1));
  rep.escape_ok = d == 2 ? std::abs(rep.escape - Scalar(0.75)) <= Scalar(1e-12)
                         : (rep.escape >= rep.escape_formula - Scalar(1e-12) &&
                            rep.escape <= Scalar(1) + Scalar(1e-15));

  const auto restr = restriction_chain(cfg, 0);
  const Scalar mix = Scalar(1) / Scalar(2 * d);
  Matrix<Scalar> closed = mix * cfg.base_chain.rows() +
                          (Scalar(1) - mix) * Matrix<Scalar>::Identity(nb, nb);
  rep.restriction_residual = (restr.rows() - closed).template lpNorm<Eigen::Infinity>();
  rep.restriction_exact = rep.restriction_residual <= Scalar(1e-12);
  rep.gamma_restriction = spectral_gap(restr, uniform);
  rep.gamma_restriction_residual = std::abs(rep.gamma_restriction - mix * rep.gamma_p0);
  rep.gamma_restriction_exact = rep.gamma_restriction_residual <= Scalar(1e-12);

  rep.contraction_holds = rep.gamma_sw <= rep.gamma_proj + Scalar(1e-12);

  rep.threefold_lhs = rep.gamma_sw;
  rep.threefold_rhs = rep.gamma_proj / Scalar(3);
  rep.threefold_holds = rep.threefold_lhs <= rep.threefold_rhs + Scalar(1e-12);

  rep.relax_ge_lhs = Scalar(1) / rep.gamma_sw;
  rep.relax_ge_rhs = Scalar(d) * npl +
                     Scalar(3) * rep.escape_formula * Scalar(d) * npl / rep.gamma_proj;
  rep.relax_ge_holds = rep.relax_ge_lhs >= rep.relax_ge_rhs - Scalar(1e-9);
  rep.relax_le_lhs = rep.relax_ge_lhs;
  rep.relax_le_rhs = rep.relax_ge_rhs;
  rep.relax_le_holds = rep.relax_le_lhs <= rep.relax_le_rhs + Scalar(1e-9);

  rep.decomposition_lower =
      std::min(rep.gamma_proj / Scalar(3),
               rep.gamma_proj * rep.gamma_restriction /
                   (Scalar(3) * rep.escape + rep.gamma_proj));
  rep.decomposition_lower_holds = rep.gamma_sw >= rep.decomposition_lower - Scalar(1e-12);

  if (d == 2) {
    rep.equality_gamma_lhs = Scalar(1) / rep.gamma_sw;
    rep.equality_gamma_rhs = Scalar(2) * npl + Scalar(4.5) * npl / rep.gamma_proj;
    rep.equality_gamma_residual = rep.equality_gamma_lhs - rep.equality_gamma_rhs;
    rep.equality_alpha_lhs = Scalar(1) / rep.alpha_sw.numeric;
    rep.equality_alpha_rhs = Scalar(4) * npl + Scalar(9) * npl / rep.alpha_proj.numeric;
    rep.equality_alpha_residual = rep.equality_alpha_lhs - rep.equality_alpha_rhs;
  }

  rep.tmix_proj = l2_mixing_time(proj, piproj, Scalar(1) / std::exp(Scalar(1)));
  rep.tmix_proj_bound =
      (Scalar(4) + std::log(cfg.betas.back() * rep.oscillation +
                            Scalar(rep.n_bits) * std::log(Scalar(2)))) /
      rep.alpha_proj.lower;
  rep.tmix_upper_holds = rep.tmix_proj <= rep.tmix_proj_bound + Scalar(1e-6);
  if (psw.size() <= 4096)
    rep.tmix_sw = l2_mixing_time(psw, pisw, Scalar(1) / std::exp(Scalar(1)));

  rep.notes.push_back("computed gamma(P0) = 2/N = " + std::to_string(double(rep.gamma_p0)) +
                      "; the 2/(N+1) display (" + std::to_string(double(rep.gamma_p0_display)) +
                      ") matches the lazier Gibbs-sampler convention, recorded not asserted");
  rep.notes.push_back("numeric alpha(P0)/gamma(P0) = " +
                      std::to_string(double(rep.alpha_gamma_ratio_p0)) +
                      " (the 1/2 ratio holds; the absolute 1/(N+1) display does not)");
  rep.notes.push_back("threefold and equality/>= displays are evaluated and recorded only: the "
                      "decomposition theorem they derive from bounds the full-chain gap from "
                      "below, so only the <=-form relaxation display is asserted");

  rep.all_asserted_hold = rep.restriction_exact && rep.gamma_restriction_exact && rep.escape_ok &&
                          rep.contraction_holds && rep.relax_le_holds &&
                          rep.decomposition_lower_holds && rep.tmix_upper_holds;
  return rep;
}

}  // namespace mcgeo
