#include <doctest.h>

#include "helpers.hpp"
#include "mcgeo/spectral.hpp"
#include "mcgeo/swapping.hpp"

using namespace mcgeo;
using testutil::Rand;

namespace {

StochasticMatrix two_state(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << 1 - a, a, b, 1 - b;
  return StochasticMatrix(ProductStateSpace::single(2), m);
}

// Exhaustive bottleneck oracle, written independently of the library scan.
double cheeger_oracle(const StochasticMatrix& p, const Distribution& pi) {
  const Index n = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double pa = 0;
    for (Index i = 0; i < n; ++i)
      if (mask >> i & 1u) pa += pi(i);
    if (pa <= 0 || pa > 0.5 + 1e-15) continue;
    double flow = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if ((mask >> i & 1u) && !(mask >> j & 1u)) flow += pi(i) * p(i, j);
    best = std::min(best, flow / pa);
  }
  return best;
}

}  // namespace

TEST_CASE("spectral gap of small chains") {
  const auto uni = Distribution::uniform(ProductStateSpace::single(2));
  CHECK(spectral_gap(two_state(0.5, 0.5), uni) == doctest::Approx(1.0).epsilon(1e-13));

  // two-state general: eigenvalues are 1 and 1-a-b
  const auto p = two_state(0.3, 0.1);
  const auto pi = stationary_distribution(p);
  CHECK(spectral_gap(p, pi) == doctest::Approx(0.4).epsilon(1e-12));

  const auto flip = hypercube_flip_walk<double>(3);
  const auto uni8 = Distribution::uniform(flip.space());
  CHECK(spectral_gap(flip, uni8) == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("spectral gap matches the variational characterization from above") {
  Rand rng(281);
  auto [p, pi] = rng.reversible(ProductStateSpace::single(5));
  const double gamma = spectral_gap(p, pi);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd f(5);
    for (Index i = 0; i < 5; ++i) f[i] = rng.uniform() - 0.5;
    const double mean = f.dot(pi.mass());
    double var = 0;
    for (Index i = 0; i < 5; ++i) var += pi(i) * (f[i] - mean) * (f[i] - mean);
    if (var < 1e-12) continue;
    double dirichlet = 0;
    for (Index x = 0; x < 5; ++x)
      for (Index y = 0; y < 5; ++y)
        dirichlet += 0.5 * pi(x) * p(x, y) * (f[x] - f[y]) * (f[x] - f[y]);
    CHECK(dirichlet / var >= gamma - 1e-8);
  }
}

TEST_CASE("spectral gap rejects non-reversible chains but reports the quotient") {
  Rand rng(283);
  const auto pi = rng.distribution(ProductStateSpace::single(3));
  const auto p = rng.stationary_nonreversible(pi);
  REQUIRE(reversibility_residual(p, pi) > 1e-9);
  CHECK_THROWS_WITH_AS(spectral_gap(p, pi), doctest::Contains("variational quotient"), Error);
}

TEST_CASE("log-Sobolev bracket collapses for the uniform two-state chain") {
  const auto p = two_state(0.3, 0.3);
  const auto uni = Distribution::uniform(ProductStateSpace::single(2));
  const auto b = log_sobolev_bracket(p, uni);
  CHECK(b.lower == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b.numeric == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("log-Sobolev numeric finds the hypercube ratio 1/2") {
  for (Index n : {2, 3}) {
    const auto flip = hypercube_flip_walk<double>(n);
    const auto uni = Distribution::uniform(flip.space());
    const double gamma = spectral_gap(flip, uni);
    const auto b = log_sobolev_bracket(flip, uni);
    CHECK(b.lower <= b.numeric + 1e-12);
    CHECK(b.numeric <= b.upper + 1e-12);
    CHECK(b.numeric / gamma == doctest::Approx(0.5).epsilon(5e-3));
  }
}

TEST_CASE("log-Sobolev bracket ordering on random reversible chains") {
  Rand rng(293);
  for (int trial = 0; trial < 5; ++trial) {
    auto [p, pi] = rng.reversible(ProductStateSpace::single(4));
    const auto b = log_sobolev_bracket(p, pi);
    CHECK(b.lower <= b.numeric + 1e-9);
    CHECK(b.numeric <= b.upper + 1e-9);
    CHECK(b.lower > 0);
  }
}

TEST_CASE("bottleneck constants") {
  const auto uni2 = Distribution::uniform(ProductStateSpace::single(2));
  CHECK(cheeger_constant(two_state(0.3, 0.3), uni2) == doctest::Approx(0.3).epsilon(1e-14));

  // deterministic two-state flip has period 2: rejected by the gated op
  CHECK_THROWS_WITH_AS(cheeger_constant(two_state(1.0, 1.0), uni2), doctest::Contains("aperiodic"),
                       Error);

  // the hypercube flip walk is period-2 as well; the raw scan still evaluates
  // the cut functional and finds the half-cube value 1/N
  const auto flip = hypercube_flip_walk<double>(3);
  const auto uni8 = Distribution::uniform(flip.space());
  CHECK_THROWS_AS(cheeger_constant(flip, uni8), Error);
  const double phi = cheeger_scan(flip, uni8);
  CHECK(phi == doctest::Approx(cheeger_oracle(flip, uni8)).epsilon(1e-14));
  CHECK(phi == doctest::Approx(1.0 / 3).epsilon(1e-13));
}

TEST_CASE("bottleneck scan agrees with the subset oracle") {
  Rand rng(307);
  for (int trial = 0; trial < 5; ++trial) {
    auto [p, pi] = rng.reversible(ProductStateSpace::single(5), /*lazy=*/true);
    const double phi = cheeger_constant(p, pi);
    CHECK(phi == doctest::Approx(cheeger_oracle(p, pi)).epsilon(1e-13));
    // classical two-sided comparison for lazy reversible chains (advisory)
    const double gamma = spectral_gap(p, pi);
    CHECK(phi * phi / 2 <= gamma + 1e-12);
    CHECK(gamma <= 2 * phi + 1e-12);
  }
}

TEST_CASE("hitting analysis of the symmetric two-state chain") {
  const auto p = two_state(0.5, 0.5);
  const auto uni = Distribution::uniform(ProductStateSpace::single(2));
  const auto rep = hitting_analysis(p, uni);
  CHECK(rep.hit(0, 0) == 0.0);
  CHECK(rep.hit(1, 1) == 0.0);
  CHECK(rep.hit(0, 1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(rep.commute(0, 1) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(rep.t_c == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(rep.t_av == doctest::Approx(1.0).epsilon(1e-13));  // 2 * (1/4) * 2
}

TEST_CASE("hitting times solve the first-step equations") {
  Rand rng(311);
  auto [p, pi] = rng.reversible(ProductStateSpace::single(4));
  const auto rep = hitting_analysis(p, pi);
  for (Index y = 0; y < 4; ++y)
    for (Index x = 0; x < 4; ++x) {
      if (x == y) continue;
      double expect = 1.0;
      for (Index z = 0; z < 4; ++z)
        if (z != y) expect += p(x, z) * rep.hit(z, y);
      CHECK(rep.hit(x, y) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("heat kernel") {
  const auto p = two_state(0.5, 0.5);
  const auto uni = Distribution::uniform(ProductStateSpace::single(2));
  CHECK(heat_kernel(p, 0.0).rows().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(heat_kernel(p, -1.0), Error);

  for (double t : {0.3, 1.0, 2.5}) {
    const auto ht = heat_kernel(p, t);
    CHECK(ht(0, 0) == doctest::Approx(0.5 + 0.5 * std::exp(-t)).epsilon(1e-12));
    // eigendecomposition route agrees with scaling-and-squaring
    const auto he = heat_kernel(p, uni, t);
    CHECK((ht.rows() - he.rows()).lpNorm<Eigen::Infinity>() <= 1e-12);
  }

  Rand rng(313);
  const auto q = rng.stochastic(ProductStateSpace::single(4));
  for (double s : {0.4, 1.3}) {
    const auto hs = heat_kernel(q, s);
    const auto ht = heat_kernel(q, 0.9);
    const auto hst = heat_kernel(q, s + 0.9);
    CHECK((hst.rows() - hs.rows() * ht.rows()).lpNorm<Eigen::Infinity>() <= 1e-9);
    for (Index x = 0; x < 4; ++x) CHECK(std::abs(hs.rows().row(x).sum() - 1.0) <= 1e-10);
  }
}

TEST_CASE("L2 mixing time of the symmetric two-state chain is 1 at 1/e") {
  const auto p = two_state(0.5, 0.5);
  const auto uni = Distribution::uniform(ProductStateSpace::single(2));
  const double t = l2_mixing_time(p, uni, 1.0 / std::exp(1.0));
  CHECK(t == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(l2_mixing_time(p, uni, 1.5) == 0.0);  // threshold above the t=0 distance
}

TEST_CASE("mixing time respects the log-Sobolev sandwich") {
  Rand rng(317);
  for (int trial = 0; trial < 5; ++trial) {
    auto [p, pi] = rng.reversible(ProductStateSpace::single(4), /*lazy=*/true);
    const auto b = log_sobolev_bracket(p, pi);
    const double t = l2_mixing_time(p, pi, 1.0 / std::exp(1.0));
    CHECK(t >= 1.0 / (2 * b.upper) - 1e-6);
    const double pistar = pi.mass().minCoeff();
    CHECK(t <= (4 + std::log(std::log(1.0 / pistar))) / b.lower + 1e-6);
  }
}

TEST_CASE("contraction report on the full set is all equalities") {
  Rand rng(331);
  auto [p, pi] = rng.reversible(ProductStateSpace({2, 2}), /*lazy=*/true);
  const auto rep = contraction_report(p, pi, CoordinateSubset::full(2), CoordinateSubset::full(2));
  CHECK(rep.levels[0].gamma == doctest::Approx(rep.levels[1].gamma).epsilon(1e-12));
  CHECK(rep.levels[1].gamma == doctest::Approx(rep.levels[2].gamma).epsilon(1e-12));
  CHECK(rep.all_asserted_hold);
}

TEST_CASE("contraction report chains hold on random lazy reversible inputs") {
  Rand rng(337);
  const CoordinateSubset s(3, {0, 1}), t(3, {0});
  for (int trial = 0; trial < 5; ++trial) {
    auto [p, pi] = rng.reversible(ProductStateSpace({2, 2, 2}), /*lazy=*/true);
    const auto rep = contraction_report(p, pi, s, t);
    CHECK(rep.gamma_chain);
    CHECK(rep.tc_chain);
    CHECK(rep.tav_chain);
    CHECK(rep.ind_chain);
    CHECK(rep.dpi_chain);
    CHECK(rep.phi_chain);
    REQUIRE(rep.tensor_gap.has_value());
    CHECK(rep.tensor_gap_holds);
    CHECK(rep.all_asserted_hold);
  }
}

TEST_CASE("contraction report rejects non-reversible chains") {
  Rand rng(347);
  const auto pi = rng.distribution(ProductStateSpace({2, 2}));
  const auto p = rng.stationary_nonreversible(pi);
  CHECK_THROWS_AS(contraction_report(p, pi, CoordinateSubset(2, {0}), CoordinateSubset(2, {0})),
                  Error);
}
