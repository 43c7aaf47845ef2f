#include "fbgreedy/greedy.hpp"

#include "fbgreedy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbgreedy {

void GreedyConfig::validate(std::size_t p) const {
  if (!(stop_threshold > 0.0)) throw InvalidArgument("stop threshold must be positive");
  if (!(backward_factor > 0.0 && backward_factor < 1.0))
    throw InvalidArgument("backward factor must lie in (0, 1)");
  if (max_support > p) throw InvalidArgument("max_support exceeds the loss dimension");
  if (!(inner_tol > 0.0) || inner_max_iter < 1)
    throw InvalidArgument("inner solver needs inner_tol > 0 and inner_max_iter >= 1");
  if (!(line_search_tol > 0.0)) throw InvalidArgument("line search tolerance must be positive");
}

std::size_t GreedyConfig::support_cap(std::size_t p) const {
  return max_support == 0 ? p : std::min(max_support, p);
}

std::size_t default_max_support(std::size_t p, double expected_sparsity) {
  if (!(expected_sparsity > 0.0)) return p;
  return std::min(p, 4 * static_cast<std::size_t>(std::ceil(expected_sparsity)));
}

std::size_t GreedyTrace::forward_count() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const TraceStep& s) { return s.kind == StepKind::forward; }));
}

std::size_t GreedyTrace::backward_count() const { return steps.size() - forward_count(); }

namespace {

// Newton steps smaller than this (relative to the iterate) count as converged.
constexpr double kStepTol = 1e-6;
// Coefficients beyond this magnitude on a failed solve indicate separation.
constexpr double kSeparationMagnitude = 30.0;
// Curvature below this along a coordinate means the line has flattened out
// (a logistic margin beyond ~30), so no finite minimizer is in reach.
constexpr double kMinCurvature = 1e-14;

bool contains(std::span<const std::size_t> sorted, std::size_t j) {
  return std::binary_search(sorted.begin(), sorted.end(), j);
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string describe_failure(const std::string& what, double magnitude) {
  std::ostringstream os;
  os << what << " (max |coefficient| = " << magnitude;
  if (magnitude > kSeparationMagnitude) os << "; data look separable";
  os << ")";
  return os.str();
}

}  // namespace

std::pair<double, double> minimize_along(const SmoothLoss& loss, const ParamVector& theta,
                                         std::size_t j, const GreedyConfig& config) {
  const CoordinateLine line = loss.along(theta.coeffs(), j);
  LinePoint pt = line(0.0);

  if (loss.is_quadratic()) {
    if (pt.curvature <= 0.0) {
      if (pt.slope == 0.0) return {0.0, pt.value};
      throw InnerSolveFailure("coordinate has zero curvature", {j});
    }
    const double alpha = -pt.slope / pt.curvature;
    return {alpha, line(alpha).value};
  }

  // Safeguarded Newton on a convex 1-D function: keep a bracket [lo, hi]
  // around the root of phi' and bisect whenever Newton leaves it.
  double a = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < config.inner_max_iter; ++it) {
    if (!(pt.curvature > kMinCurvature))
      throw InnerSolveFailure(describe_failure("coordinate line has no curvature", std::abs(a)),
                              {j});
    if (pt.slope < 0.0) lo = a;
    else if (pt.slope > 0.0) hi = a;

    const double step = -pt.slope / pt.curvature;
    if (std::abs(pt.slope) <= config.line_search_tol &&
        std::abs(step) <= kStepTol * std::max(1.0, std::abs(a)))
      return {a, pt.value};

    double next = a + step;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      if (std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
      else next = a + (pt.slope < 0.0 ? 1.0 : -1.0) * std::max(1.0, 2.0 * std::abs(a));
    }
    a = next;
    pt = line(a);
  }
  throw InnerSolveFailure(
      describe_failure("coordinate line search did not converge", std::abs(a)), {j});
}

ForwardMove forward_search(const SmoothLoss& loss, const ParamVector& theta,
                           std::span<const std::size_t> active, const GreedyConfig& config) {
  const std::size_t p = loss.dimension();
  if (theta.dim() != p) throw InvalidArgument("theta dimension does not match the loss");
  const auto fixed = sorted_unique(loss.fixed_coordinates());
  const double base = loss.value(theta.coeffs());

  std::optional<ForwardMove> best;
  for (std::size_t j = 0; j < p; ++j) {
    if (contains(active, j) || contains(fixed, j)) continue;
    const auto [alpha, v] = minimize_along(loss, theta, j, config);
    const double gain = std::max(0.0, base - v);
    if (!best || gain > best->gain) best = ForwardMove{j, alpha, gain};
  }
  if (!best) throw NoInactiveCoordinate();
  return *best;
}

ForwardMove forward_search(const SmoothLoss& loss, const ParamVector& theta,
                           const GreedyConfig& config) {
  const auto fixed = sorted_unique(loss.fixed_coordinates());
  std::vector<std::size_t> active;
  for (std::size_t j : theta.support())
    if (!contains(fixed, j)) active.push_back(j);
  return forward_search(loss, theta, active, config);
}

ParamVector refit(const SmoothLoss& loss, std::span<const std::size_t> support,
                  const GreedyConfig& config, const std::optional<ParamVector>& warm_start) {
  const std::size_t p = loss.dimension();
  std::vector<std::size_t> coords(support.begin(), support.end());
  for (std::size_t j : loss.fixed_coordinates()) coords.push_back(j);
  coords = sorted_unique(std::move(coords));
  for (std::size_t j : coords)
    if (j >= p) throw InvalidArgument("support index out of range");

  ParamVector theta(p);
  if (warm_start) {
    if (warm_start->dim() != p) throw InvalidArgument("warm start has the wrong dimension");
    for (std::size_t j : coords) theta.set(j, (*warm_start)[j]);
  }
  if (coords.empty()) return theta;

  const auto k = static_cast<Eigen::Index>(coords.size());
  auto restricted_max = [&] {
    double m = 0.0;
    for (std::size_t j : coords) m = std::max(m, std::abs(theta[j]));
    return m;
  };

  for (std::size_t it = 0; it < config.inner_max_iter; ++it) {
    const Eigen::VectorXd full_grad = loss.gradient(theta.coeffs());
    Eigen::VectorXd g(k);
    for (Eigen::Index a = 0; a < k; ++a) g[a] = full_grad[static_cast<Eigen::Index>(coords[a])];
    const Eigen::MatrixXd h = loss.restricted_hessian(theta.coeffs(), coords);

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 1e-14 * std::max(1.0, dmax)))
      throw InnerSolveFailure(
          describe_failure("restricted Hessian is not positive definite", restricted_max()),
          std::vector<std::size_t>(support.begin(), support.end()));
    const Eigen::VectorXd step = -ldlt.solve(g);

    const double gnorm = g.cwiseAbs().maxCoeff();
    if (gnorm <= config.inner_tol &&
        step.cwiseAbs().maxCoeff() <= kStepTol * std::max(1.0, restricted_max()))
      return theta;

    // Backtracking halving with an Armijo test; the allowance absorbs
    // round-off once the decrease is below machine precision.
    const double f0 = loss.value(theta.coeffs());
    const double slope = g.dot(step);
    const double allowance = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(f0);
    ParamVector trial = theta;
    double t = 1.0;
    for (;;) {
      for (Eigen::Index a = 0; a < k; ++a) trial.set(coords[a], theta[coords[a]] + t * step[a]);
      const double f = loss.value(trial.coeffs());
      if (std::isfinite(f) && f <= f0 + 1e-4 * t * slope + allowance) break;
      t *= 0.5;
      if (t < 1e-12) break;
    }
    theta = std::move(trial);
  }
  throw InnerSolveFailure(describe_failure("restricted Newton solve did not converge within " +
                                               std::to_string(config.inner_max_iter) +
                                               " iterations",
                                           restricted_max()),
                          std::vector<std::size_t>(support.begin(), support.end()));
}

BackwardMove backward_scan(const SmoothLoss& loss, const ParamVector& theta,
                           std::span<const std::size_t> active) {
  if (active.empty()) throw EmptySupport();
  const double base = loss.value(theta.coeffs());
  ParamVector probe = theta;
  std::optional<BackwardMove> best;
  for (std::size_t j : active) {
    probe.set(j, 0.0);
    const double increase = loss.value(probe.coeffs()) - base;
    probe.set(j, theta[j]);
    if (!best || increase < best->increase) best = BackwardMove{j, increase};
  }
  return *best;
}

BackwardMove backward_scan(const SmoothLoss& loss, const ParamVector& theta) {
  const auto fixed = sorted_unique(loss.fixed_coordinates());
  std::vector<std::size_t> active;
  for (std::size_t j : theta.support())
    if (!contains(fixed, j)) active.push_back(j);
  return backward_scan(loss, theta, active);
}

GreedyResult run_greedy(const SmoothLoss& loss, const GreedyConfig& config) {
  const std::size_t p = loss.dimension();
  config.validate(p);
  const auto fixed = sorted_unique(loss.fixed_coordinates());
  const std::size_t candidates = p - fixed.size();
  const std::size_t cap = std::min(config.support_cap(p), candidates);
  const double nu = config.backward_factor;

  GreedyResult result;
  std::vector<std::size_t>& active = result.active;
  ParamVector theta = fixed.empty() ? ParamVector(p) : refit(loss, {}, config);
  double current = loss.value(theta.coeffs());

  GreedyTrace& trace = result.trace;
  trace.initial_loss = current;
  trace.gain_by_size.assign(candidates + 1, 0.0);

  // Each round lowers the loss by at least (1 - nu) eps_S, so this is far
  // beyond any legitimate run.
  const std::size_t round_guard = 1000 * (candidates + 1);
  for (std::size_t round = 0;; ++round) {
    if (round > round_guard) throw Error("forward-backward greedy failed to terminate");
    if (active.size() == candidates) {
      result.terminal_forward_gain = 0.0;
      break;
    }
    const ForwardMove fwd = forward_search(loss, theta, active, config);
    if (fwd.gain <= config.stop_threshold) {
      result.terminal_forward_gain = fwd.gain;
      break;
    }
    if (active.size() >= cap) {
      result.support_cap_reached = true;
      result.terminal_forward_gain = fwd.gain;
      break;
    }

    active.insert(std::upper_bound(active.begin(), active.end(), fwd.index), fwd.index);
    ParamVector warm = theta;
    warm.set(fwd.index, fwd.step);
    theta = refit(loss, active, config, warm);
    current = loss.value(theta.coeffs());
    std::size_t k = active.size();
    trace.gain_by_size[k] = fwd.gain;
    trace.steps.push_back({StepKind::forward, fwd.index, k, fwd.gain, current});

    while (!active.empty()) {
      const BackwardMove bwd = backward_scan(loss, theta, active);
      if (bwd.increase > nu * trace.gain_by_size[k]) break;
      active.erase(std::find(active.begin(), active.end(), bwd.index));
      ParamVector reduced = theta;
      reduced.set(bwd.index, 0.0);
      theta = refit(loss, active, config, reduced);
      current = loss.value(theta.coeffs());
      --k;
      trace.steps.push_back({StepKind::backward, bwd.index, k, 0.0, current});
    }
  }

  result.theta_hat = std::move(theta);
  result.final_loss = current;
  return result;
}

ContractReport audit_greedy(const SmoothLoss& loss, const GreedyConfig& config,
                            const GreedyResult& result, double slack) {
  ContractReport report;
  const double eps = config.stop_threshold;
  const double nu = config.backward_factor;
  const double required = (1.0 - nu) * eps;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };

  const auto& steps = result.trace.steps;
  // last_at_size[k]: loss the last time the support had size k.
  std::vector<double> last_at_size(result.trace.gain_by_size.size() + 1,
                                   std::numeric_limits<double>::quiet_NaN());
  last_at_size[0] = result.trace.initial_loss;
  double current = result.trace.initial_loss;
  std::size_t size = 0;
  report.min_round_decrease = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < steps.size();) {
    if (steps[i].kind != StepKind::forward) {
      fail("trace begins a round with a backward step");
      break;
    }
    const double before = current;
    if (!(steps[i].gain > eps)) fail("forward record with gain <= eps_S");
    size = steps[i].size_after;
    current = steps[i].loss_after;
    std::size_t removals = 0;
    std::size_t j = i + 1;
    for (; j < steps.size() && steps[j].kind == StepKind::backward; ++j) {
      ++removals;
      size = steps[j].size_after;
      current = steps[j].loss_after;
    }
    const double reference = removals == 0 ? before : last_at_size[size];
    const double decrease = reference - current;
    report.min_round_decrease = std::min(report.min_round_decrease, decrease);
    if (!(decrease >= required - slack)) {
      std::ostringstream os;
      os << "round ending at step " << j - 1 << " lowered the loss by " << decrease
         << " < (1 - nu) eps_S = " << required;
      fail(os.str());
    }
    // Every size passed through in this round now holds its latest loss.
    last_at_size[steps[i].size_after] = steps[i].loss_after;
    for (std::size_t q = i + 1; q < j; ++q) last_at_size[steps[q].size_after] = steps[q].loss_after;
    i = j;
  }
  if (steps.empty()) report.min_round_decrease = 0.0;

  const double forwards = static_cast<double>(result.trace.forward_count());
  const double bound = (result.trace.initial_loss - result.final_loss) / required + 1.0;
  if (forwards > bound + slack) fail("forward step count exceeds the termination bound");

  const auto fixed = sorted_unique(loss.fixed_coordinates());
  const std::size_t candidates = loss.dimension() - fixed.size();
  if (result.active.size() < candidates && !result.support_cap_reached) {
    const ForwardMove fwd = forward_search(loss, result.theta_hat, result.active, config);
    report.recomputed_forward_gain = fwd.gain;
    if (fwd.gain > eps + config.line_search_tol)
      fail("terminal forward gain " + std::to_string(fwd.gain) + " exceeds eps_S");
  }
  if (result.terminal_forward_gain > eps + config.line_search_tol && !result.support_cap_reached)
    fail("recorded terminal forward gain exceeds eps_S");

  if (!result.active.empty()) {
    const BackwardMove bwd = backward_scan(loss, result.theta_hat, result.active);
    report.terminal_backward_increase = bwd.increase;
    const double threshold = nu * result.trace.gain_by_size[result.active.size()];
    if (!(bwd.increase > threshold))
      fail("terminal backward increase " + std::to_string(bwd.increase) +
           " does not exceed nu * gain = " + std::to_string(threshold));
    if (nu == 0.5) report.half_threshold_backward = bwd.increase > 0.5 * eps;
  }

  for (std::size_t j : result.theta_hat.support())
    if (!contains(result.active, j) && !contains(fixed, j))
      fail("nonzero coefficient outside the active set at " + std::to_string(j));
  return report;
}

}  // namespace fbgreedy
