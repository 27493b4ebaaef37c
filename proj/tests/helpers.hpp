#pragma once

#include <cmath>
#include <vector>

#include "mcgeo/divergences.hpp"
#include "mcgeo/markov.hpp"
#include "mcgeo/rng.hpp"

namespace testutil {

using namespace mcgeo;

// Seeded instance generator for the test corpora.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return gen_.next_double(); }
  Index below(Index n) { return static_cast<Index>(gen_.next_below(static_cast<std::uint64_t>(n))); }

  Distribution distribution(const ProductStateSpace& space, double floor = 0.05) {
    Eigen::VectorXd m(space.total());
    for (Index i = 0; i < m.size(); ++i) m[i] = floor + uniform();
    return Distribution(space, m / m.sum());
  }

  Distribution product_distribution(const ProductStateSpace& space, double floor = 0.05) {
    std::vector<Distribution> margins;
    for (Index s : space.factor_sizes())
      margins.push_back(distribution(ProductStateSpace::single(s), floor));
    return tensor_product(margins);
  }

  StochasticMatrix stochastic(const ProductStateSpace& space, double floor = 0.05) {
    Eigen::MatrixXd m(space.total(), space.total());
    for (Index x = 0; x < m.rows(); ++x) {
      for (Index y = 0; y < m.cols(); ++y) m(x, y) = floor + uniform();
      m.row(x) /= m.row(x).sum();
    }
    return StochasticMatrix(space, std::move(m));
  }

  // Reversible pair built from symmetric weights: P(x,y) = W(x,y)/row sum,
  // pi proportional to the row sums.
  std::pair<StochasticMatrix, Distribution> reversible(const ProductStateSpace& space,
                                                       bool lazy = false) {
    const Index n = space.total();
    Eigen::MatrixXd w(n, n);
    for (Index x = 0; x < n; ++x)
      for (Index y = x; y < n; ++y) w(x, y) = w(y, x) = 0.05 + uniform();
    Eigen::VectorXd rows = w.rowwise().sum();
    Eigen::MatrixXd p = rows.cwiseInverse().asDiagonal() * w;
    if (lazy) p = 0.5 * (p + Eigen::MatrixXd::Identity(n, n));
    return {StochasticMatrix(space, std::move(p)),
            Distribution(space, rows / rows.sum())};
  }

  // Metropolis kernel for pi from a random symmetric positive proposal;
  // reversible, hence pi-stationary.
  StochasticMatrix metropolis(const Distribution& pi) {
    const Index n = pi.size();
    Eigen::MatrixXd sym(n, n);
    for (Index x = 0; x < n; ++x)
      for (Index y = x; y < n; ++y) sym(x, y) = sym(y, x) = 0.05 + uniform();
    sym /= sym.rowwise().sum().maxCoeff();  // sub-stochastic, still symmetric
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Index x = 0; x < n; ++x) {
      double off = 0;
      for (Index y = 0; y < n; ++y) {
        if (y == x) continue;
        p(x, y) = sym(x, y) * std::min(1.0, pi(y) / pi(x));
        off += p(x, y);
      }
      p(x, x) = 1.0 - off;
    }
    return StochasticMatrix(pi.space(), std::move(p));
  }

  // pi-stationary but generically non-reversible: composition of two
  // independent Metropolis kernels for the same pi.
  StochasticMatrix stationary_nonreversible(const Distribution& pi) {
    const auto a = metropolis(pi);
    const auto b = metropolis(pi);
    return StochasticMatrix(pi.space(), a.rows() * b.rows());
  }

 private:
  SplitMix64 gen_;
};

// Independent double-sum KL oracle (no library divergence path).
inline double kl_chains_oracle(const Distribution& pi, const StochasticMatrix& m,
                               const StochasticMatrix& l) {
  double acc = 0;
  for (Index x = 0; x < pi.size(); ++x) {
    if (pi(x) <= 0) continue;
    for (Index y = 0; y < pi.size(); ++y) {
      if (m(x, y) <= 0) continue;
      if (l(x, y) <= 0) return std::numeric_limits<double>::infinity();
      acc += pi(x) * m(x, y) * std::log(m(x, y) / l(x, y));
    }
  }
  return acc;
}

// Euclidean projection onto the probability simplex (Held et al.).
inline Eigen::VectorXd project_simplex(Eigen::VectorXd v) {
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double css = 0;
  Index rho = 0;
  double theta = 0;
  for (Index i = 0; i < u.size(); ++i) {
    css += u[i];
    if (u[i] + (1.0 - css) / double(i + 1) > 0) {
      rho = i;
      theta = (css - 1.0) / double(i + 1);
    } else {
      css -= u[i];
    }
  }
  (void)rho;
  Eigen::VectorXd out = (v.array() - theta).max(1e-12);
  return out / out.sum();
}

// Projected finite-difference gradient descent over one row-stochastic factor
// with the others fixed: the independent optimizer used to cross-check the
// closed-form prescribed projections. Touches only divergence evaluations.
template <typename Objective>
double projected_gradient_oracle(Index n, const Objective& objective, Rand& rng,
                                 int restarts = 20, int iters = 250) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd l(n, n);
    if (r == 0) {
      l.setConstant(1.0 / double(n));
    } else {
      for (Index x = 0; x < n; ++x) {
        for (Index y = 0; y < n; ++y) l(x, y) = 0.05 + rng.uniform();
        l.row(x) /= l.row(x).sum();
      }
    }
    double val = objective(l);
    double step = 0.05;
    for (int it = 0; it < iters && step > 1e-10; ++it) {
      Eigen::MatrixXd grad(n, n);
      const double h = 1e-6;
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) {
          Eigen::MatrixXd lp = l;
          lp(x, y) += h;
          lp.row(x) /= lp.row(x).sum();
          grad(x, y) = (objective(lp) - val) / h;
        }
      Eigen::MatrixXd cand = l - step * grad;
      for (Index x = 0; x < n; ++x) cand.row(x) = project_simplex(cand.row(x).transpose()).transpose();
      const double cval = objective(cand);
      if (cval < val) {
        l = cand;
        val = cval;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, val);
  }
  return best;
}

}  // namespace testutil
