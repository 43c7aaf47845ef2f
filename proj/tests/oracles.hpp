#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers; fixtures are evaluated from first principles.

#include <fbgreedy/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Spins = std::vector<std::vector<int>>;  // rows of ±1

// ---------------------------------------------------------------- derivatives

inline Vec central_difference(const std::function<double(const Vec&)>& f, Vec x,
                              double h = 1e-5) {
  Vec g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double x0 = x[j];
    x[j] = x0 + h;
    const double up = f(x);
    x[j] = x0 - h;
    const double dn = f(x);
    x[j] = x0;
    g[j] = (up - dn) / (2 * h);
  }
  return g;
}

// max_j |a_j - b_j| / max(1, |b_j|)
inline double max_relative_error(const Eigen::VectorXd& a, const Vec& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j)
    worst = std::max(worst, std::abs(a[static_cast<Eigen::Index>(j)] - b[j]) /
                                std::max(1.0, std::abs(b[j])));
  return worst;
}

// ------------------------------------------------------------- node logistic

// (1/n) sum log(1 + e^m) - m written with the textbook formula. Only used on
// fixtures with small margins.
inline double node_nll(const Spins& x, std::size_t r, const Vec& theta) {
  double total = 0.0;
  for (const auto& row : x) {
    double m = 0.0;
    std::size_t j = 0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t == r) continue;
      m += theta[j++] * row[r] * row[t];
    }
    total += std::log(1.0 + std::exp(m)) - m;
  }
  return total / static_cast<double>(x.size());
}

inline Vec node_nll_gradient(const Spins& x, std::size_t r, const Vec& theta) {
  Vec g(theta.size(), 0.0);
  for (const auto& row : x) {
    double m = 0.0;
    std::size_t j = 0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t == r) continue;
      m += theta[j++] * row[r] * row[t];
    }
    const double s = 1.0 / (1.0 + std::exp(-m)) - 1.0;
    j = 0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t == r) continue;
      g[j++] += s * row[r] * row[t];
    }
  }
  for (double& v : g) v /= static_cast<double>(x.size());
  return g;
}

// ------------------------------------------------------------------ 1-D search

struct GridMin {
  double alpha;
  double value;
};

// Exhaustive scan of f over [lo, hi] with spacing h.
inline GridMin grid_minimize(const std::function<double(double)>& f, double lo = -5.0,
                             double hi = 5.0, double h = 1e-4) {
  GridMin best{lo, f(lo)};
  const auto steps = static_cast<long>(std::llround((hi - lo) / h));
  for (long i = 1; i <= steps; ++i) {
    const double a = lo + static_cast<double>(i) * h;
    const double v = f(a);
    if (v < best.value) best = {a, v};
  }
  return best;
}

// Root of an increasing function on [lo, hi] by bisection.
inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi,
                                double tol = 1e-13) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Minimizer of a smooth convex 2-D function given its partial derivatives:
// for fixed a, b(a) solves d/db = 0; then d/da along (a, b(a)) is increasing.
inline std::pair<double, double> bisect_stationary_2d(
    const std::function<double(double, double)>& da,
    const std::function<double(double, double)>& db, double box = 20.0) {
  auto inner = [&](double a) {
    return bisect_increasing([&](double b) { return db(a, b); }, -box, box);
  };
  const double a = bisect_increasing([&](double a) { return da(a, inner(a)); }, -box, box);
  return {a, inner(a)};
}

// ------------------------------------------------------------------ best subset

struct Subset {
  std::vector<std::size_t> support;
  double loss;
};

// Least-squares loss ||y - X_S b||^2 / (2n) minimized over b.
inline double subset_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const std::vector<std::size_t>& S) {
  const double n = static_cast<double>(X.rows());
  if (S.empty()) return y.squaredNorm() / (2 * n);
  Eigen::MatrixXd XS(X.rows(), static_cast<Eigen::Index>(S.size()));
  for (std::size_t c = 0; c < S.size(); ++c)
    XS.col(static_cast<Eigen::Index>(c)) = X.col(static_cast<Eigen::Index>(S[c]));
  const Eigen::VectorXd b = XS.colPivHouseholderQr().solve(y);
  return (y - XS * b).squaredNorm() / (2 * n);
}

// Best subset of exactly size k (lexicographically first on ties).
inline Subset best_subset_of_size(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  std::size_t k) {
  const auto p = static_cast<std::size_t>(X.cols());
  Subset best{{}, std::numeric_limits<double>::infinity()};
  std::vector<bool> pick(p, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::vector<std::size_t> S;
    for (std::size_t j = 0; j < p; ++j)
      if (pick[j]) S.push_back(j);
    const double v = subset_loss(X, y, S);
    if (v < best.loss - 1e-14) best = {S, v};
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Smallest subset (size <= kmax) that attains zero loss, for noiseless data.
inline Subset best_interpolating_subset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        std::size_t kmax, double zero = 1e-12) {
  for (std::size_t k = 0; k <= kmax; ++k) {
    Subset s = best_subset_of_size(X, y, k);
    if (s.loss <= zero) return s;
  }
  return {{}, std::numeric_limits<double>::infinity()};
}

// n x p design with X^T X / n = I.
inline Eigen::MatrixXd orthonormal_design(std::size_t n, std::size_t p, std::uint64_t seed) {
  fbgreedy::CounterRng rng(seed);
  Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      // Box-Muller
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      G(i, j) = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
    }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(G.rows(), G.cols());
  return Q * std::sqrt(static_cast<double>(n));
}

inline double gaussian(fbgreedy::CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
}

// ------------------------------------------------------------------ Ising

struct Coupling {
  std::size_t a, b;
  double w;
};

// Unnormalized-then-normalized Boltzmann weights; state s has x_r = +1 iff
// bit r is set.
inline Vec enumerate_ising(std::size_t p, const Vec& fields, const std::vector<Coupling>& cs) {
  Vec w(std::size_t{1} << p);
  double z = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    auto spin = [&](std::size_t r) { return ((s >> r) & 1U) ? 1.0 : -1.0; };
    double e = 0.0;
    for (std::size_t r = 0; r < p; ++r) e += fields[r] * spin(r);
    for (const auto& c : cs) e += c.w * spin(c.a) * spin(c.b);
    w[s] = std::exp(e);
    z += w[s];
  }
  for (double& v : w) v /= z;
  return w;
}

inline double pair_moment(const Vec& dist, std::size_t a, std::size_t b) {
  double m = 0.0;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    const double xa = ((s >> a) & 1U) ? 1.0 : -1.0;
    const double xb = ((s >> b) & 1U) ? 1.0 : -1.0;
    m += dist[s] * xa * xb;
  }
  return m;
}

}  // namespace oracle
