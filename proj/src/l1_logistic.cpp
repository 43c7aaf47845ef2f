#include "fbgreedy/errors.hpp"
#include "fbgreedy/structure.hpp"

#include <cmath>
#include <limits>

namespace fbgreedy {

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

std::vector<bool> penalty_mask(const NodeConditionalLogisticLoss& loss) {
  std::vector<bool> penalized(loss.dimension(), true);
  for (std::size_t j : loss.fixed_coordinates()) penalized[j] = false;
  return penalized;
}

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double l1_lambda(double c_prime, std::size_t n, std::size_t p) {
  if (n == 0 || p < 2) throw InvalidArgument("lambda needs n >= 1 and p >= 2");
  return c_prime * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double l1_subgradient_violation(const NodeConditionalLogisticLoss& loss,
                                std::span<const double> theta, double lambda) {
  const Eigen::VectorXd g = loss.gradient(theta);
  const auto penalized = penalty_mask(loss);
  double worst = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double gj = g[static_cast<Eigen::Index>(j)];
    double v;
    if (!penalized[j]) v = std::abs(gj);
    else if (theta[j] != 0.0) v = std::abs(gj + lambda * (theta[j] > 0 ? 1.0 : -1.0));
    else v = std::max(0.0, std::abs(gj) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

L1Solution solve_l1_logistic(const NodeConditionalLogisticLoss& loss, double lambda,
                             const L1Options& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("l1 penalty must be positive");
  const auto dim = static_cast<Eigen::Index>(loss.dimension());
  const auto penalized = penalty_mask(loss);
  const double n = static_cast<double>(loss.samples());

  auto penalty = [&](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
      if (penalized[static_cast<std::size_t>(j)]) s += std::abs(x[j]);
    return lambda * s;
  };
  auto prox = [&](const Eigen::VectorXd& v, double step) {
    Eigen::VectorXd out(dim);
    for (Eigen::Index j = 0; j < dim; ++j)
      out[j] = penalized[static_cast<std::size_t>(j)] ? soft_threshold(v[j], step * lambda) : v[j];
    return out;
  };

  // Feature columns are ±1, so the initial step 4 n / (max column norm)^2
  // is 4 (the inverse curvature bound of a single coordinate).
  const double max_col_sq = n;
  double step = 4.0 * n / max_col_sq;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double objective = loss.value(view(x)) + penalty(x);

  L1Solution sol;
  sol.log.lambda = lambda;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const double fy = loss.value(view(y));
    const Eigen::VectorXd gy = loss.gradient(view(y));
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (;;) {
      x_new = prox(y - step * gy, step);
      const Eigen::VectorXd diff = x_new - y;
      f_new = loss.value(view(x_new));
      if (f_new <= fy + gy.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(fy))
        break;
      step *= 0.5;
      if (step < 1e-12) throw MaxIterationsExceeded("l1 backtracking collapsed the step size");
    }
    const double obj_new = f_new + penalty(x_new);
    if (obj_new > objective && t > 1.0) {
      // Momentum overshot: restart from the last iterate.
      y = x;
      t = 1.0;
      continue;
    }

    // Composite gradient mapping at the new iterate.
    const Eigen::VectorXd g_new = loss.gradient(view(x_new));
    const Eigen::VectorXd mapped = prox(x_new - step * g_new, step);
    const double gap = (x_new - mapped).cwiseAbs().maxCoeff() / step;

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    x = std::move(x_new);
    t = t_new;
    objective = obj_new;

    sol.log.iterations = it;
    sol.log.optimality_gap = gap;
    if (gap <= options.tol) {
      sol.coefficients = std::move(x);
      return sol;
    }
  }
  throw MaxIterationsExceeded("l1 logistic solver did not reach tolerance in " +
                              std::to_string(options.max_iter) + " proximal steps");
}

NeighborhoodEstimate l1_logistic_neighborhood(const SampleMatrix& data, std::size_t node,
                                              double lambda, const L1Options& options) {
  if (data.samples() == 0) throw InvalidArgument("neighborhood estimation needs n >= 1");
  const NodeConditionalLogisticLoss loss(data, node, options.include_intercept);
  L1Solution sol = solve_l1_logistic(loss, lambda, options);
  NeighborhoodEstimate est;
  est.node = node;
  for (std::size_t j = 0; j + 1 < data.nodes(); ++j)
    if (std::abs(sol.coefficients[static_cast<Eigen::Index>(j)]) > options.support_threshold)
      est.neighbors.push_back(loss.global_index(j));
  est.coefficients.assign(sol.coefficients.data(),
                          sol.coefficients.data() + sol.coefficients.size());
  est.l1_log = sol.log;
  return est;
}

L1Selection select_l1_constant(const SampleMatrix& data, std::span<const double> candidates,
                               double holdout, const L1Options& options) {
  if (candidates.empty()) throw InvalidArgument("no candidate constants");
  const std::size_t n = data.samples();
  const auto n_hold = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(n)));
  if (n_hold < 1 || n_hold >= n) throw InvalidArgument("holdout split leaves an empty side");
  const SampleMatrix train = data.slice_rows(0, n - n_hold);
  const SampleMatrix held = data.slice_rows(n - n_hold, n_hold);

  L1Selection sel;
  double best = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    const double lambda = l1_lambda(c, train.samples(), data.nodes());
    double score = 0.0;
    for (std::size_t r = 0; r < data.nodes(); ++r) {
      const NodeConditionalLogisticLoss fit_loss(train, r, options.include_intercept);
      const L1Solution sol = solve_l1_logistic(fit_loss, lambda, options);
      const NodeConditionalLogisticLoss held_loss(held, r, options.include_intercept);
      score += held_loss.value(view(sol.coefficients));
    }
    sel.heldout_loss.push_back(score);
    if (score < best) {
      best = score;
      sel.c_prime = c;
    }
  }
  return sel;
}

}  // namespace fbgreedy
