#include "fbgreedy/diagnostics.hpp"

#include "fbgreedy/errors.hpp"
#include "fbgreedy/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbgreedy {

namespace {

// Calls visit(indices) for every k-subset of {0..p-1} in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t p, std::size_t k, Visit&& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    visit(std::span<const std::size_t>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == p - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

RscRss estimate_rsc_rss(const SmoothLoss& loss, std::size_t k,
                        std::span<const ParamVector> probe_points) {
  const std::size_t p = loss.dimension();
  if (p > 20) throw TooLarge("RSC/RSS enumeration is limited to p <= 20");
  if (k == 0 || k > p) throw InvalidArgument("support size must lie in [1, p]");
  if (probe_points.empty()) throw InvalidArgument("at least one probe point is required");

  RscRss out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& probe : probe_points) {
    const Eigen::MatrixXd h = loss.hessian(probe.coeffs());
    for_each_subset(p, k, [&](std::span<const std::size_t> s) {
      const auto kk = static_cast<Eigen::Index>(s.size());
      Eigen::MatrixXd sub(kk, kk);
      for (Eigen::Index a = 0; a < kk; ++a)
        for (Eigen::Index b = 0; b < kk; ++b)
          sub(a, b) = h(static_cast<Eigen::Index>(s[a]), static_cast<Eigen::Index>(s[b]));
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
      out.kappa_l = std::min(out.kappa_l, es.eigenvalues().minCoeff());
      out.kappa_u = std::max(out.kappa_u, es.eigenvalues().maxCoeff());
    });
  }
  return out;
}

double measure_noise_level(const SmoothLoss& loss, const ParamVector& theta_star) {
  return loss.gradient(theta_star.coeffs()).cwiseAbs().maxCoeff();
}

double eta_lower_bound(double rho, std::size_t s_star) {
  const double s = static_cast<double>(std::max<std::size_t>(1, s_star));
  const double inner = std::sqrt(std::max(0.0, rho * rho - rho) / s) + std::sqrt(2.0);
  return 2.0 + 4.0 * rho * rho * inner * inner;
}

std::vector<ParamVector> default_probe_points(std::size_t dim, const ParamVector& theta_star,
                                              const std::optional<ParamVector>& theta_hat,
                                              std::size_t sparsity, std::uint64_t seed,
                                              std::size_t random_count) {
  std::vector<ParamVector> probes{ParamVector(dim), theta_star};
  if (theta_hat) probes.push_back(*theta_hat);
  CounterRng rng(seed);
  sparsity = std::clamp<std::size_t>(sparsity, 1, dim);
  for (std::size_t i = 0; i < random_count; ++i) {
    ParamVector pt(dim);
    for (std::size_t q = 0; q < sparsity; ++q) {
      const std::size_t j = static_cast<std::size_t>(rng() % dim);
      pt.set(j, 2.0 * rng.uniform() - 1.0);
    }
    probes.push_back(std::move(pt));
  }
  return probes;
}

TheoryConstants estimate_theory_constants(const SmoothLoss& loss, const ParamVector& theta_star,
                                          std::span<const ParamVector> probe_points) {
  const std::size_t p = loss.dimension();
  TheoryConstants c;
  c.s_star = theta_star.support_size();
  c.lambda_n = measure_noise_level(loss, theta_star);
  std::size_t k = std::min(p, std::max<std::size_t>(1, 2 * c.s_star));
  for (;;) {
    const RscRss rr = estimate_rsc_rss(loss, k, probe_points);
    c.kappa_l = rr.kappa_l;
    c.kappa_u = rr.kappa_u;
    c.rho = rr.kappa_l > 0.0 ? rr.kappa_u / rr.kappa_l : std::numeric_limits<double>::infinity();
    c.eta = eta_lower_bound(c.rho, c.s_star);
    c.k_verified = k;
    if (!std::isfinite(c.eta)) break;
    const double want = std::ceil(c.eta * static_cast<double>(std::max<std::size_t>(1, c.s_star)));
    const std::size_t needed = want >= static_cast<double>(p) ? p : static_cast<std::size_t>(want);
    if (needed <= k) break;
    k = needed;
  }
  return c;
}

Theorem1Report check_theorem1(const GreedyResult& result, const ParamVector& theta_star,
                              const std::optional<TheoryConstants>& constants, double eps_s) {
  if (!constants || !std::isfinite(constants->kappa_l) || !std::isfinite(constants->kappa_u))
    throw MissingConstants("theorem check needs estimated RSC/RSS constants");
  const TheoryConstants& c = *constants;
  const std::size_t p = theta_star.dim();
  if (result.theta_hat.dim() != p) throw InvalidArgument("estimate and truth differ in dimension");

  Theorem1Report r;
  const auto s_true = theta_star.support();
  const double s = static_cast<double>(s_true.size());
  const auto& s_hat = result.active;

  const double want = std::ceil(c.eta * std::max(1.0, s));
  const std::size_t needed = want >= static_cast<double>(p) ? p : static_cast<std::size_t>(want);
  r.rsc_rss_verified = c.kappa_l > 0.0 && c.kappa_u >= c.kappa_l && c.k_verified >= needed &&
                       c.eta >= eta_lower_bound(c.rho, c.s_star) * (1.0 - 1e-12);

  r.required_threshold = c.kappa_l > 0.0 ? 8.0 * c.rho * c.eta / c.kappa_l * s * c.lambda_n *
                                               c.lambda_n
                                         : std::numeric_limits<double>::infinity();
  r.threshold_ok = eps_s >= r.required_threshold;

  r.required_signal = c.kappa_l > 0.0 ? std::sqrt(32.0 * c.rho * eps_s / c.kappa_l)
                                      : std::numeric_limits<double>::infinity();
  r.min_signal = std::numeric_limits<double>::infinity();
  for (std::size_t j : s_true) r.min_signal = std::min(r.min_signal, std::abs(theta_star[j]));
  r.signal_ok = s_true.empty() || r.min_signal > r.required_signal;

  double sq = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double d = result.theta_hat[j] - theta_star[j];
    sq += d * d;
  }
  r.error = std::sqrt(sq);
  r.error_bound = c.kappa_l > 0.0
                      ? 2.0 / c.kappa_l * std::sqrt(s) *
                            (c.lambda_n * std::sqrt(c.eta) + std::sqrt(2.0 * c.kappa_u * eps_s))
                      : std::numeric_limits<double>::infinity();
  r.error_bound_ok = r.error <= r.error_bound + 1e-9;

  for (std::size_t j : s_true)
    if (!std::binary_search(s_hat.begin(), s_hat.end(), j)) ++r.false_exclusions;
  for (std::size_t j : s_hat)
    if (!std::binary_search(s_true.begin(), s_true.end(), j)) ++r.false_inclusions;

  r.stopping_size_ok = static_cast<double>(s_hat.size()) <= (c.eta - 1.0) * s;
  return r;
}

bool backward_stop_inequality(const GreedyResult& result, const ParamVector& theta_star,
                              double kappa_u, double eps_s, double inflation) {
  const auto s_true = theta_star.support();
  double sq = 0.0;
  std::size_t extra = 0;
  for (std::size_t j : result.active) {
    if (std::binary_search(s_true.begin(), s_true.end(), j)) continue;
    ++extra;
    const double d = result.theta_hat[j] - theta_star[j];
    sq += d * d;
  }
  return sq >= eps_s / (inflation * kappa_u) * static_cast<double>(extra);
}

Report describe(const TheoryConstants& c) {
  return {{"kappa_l", fmt(c.kappa_l)},   {"kappa_u", fmt(c.kappa_u)},
          {"rho", fmt(c.rho)},           {"lambda_n", fmt(c.lambda_n)},
          {"eta", fmt(c.eta)},           {"s_star", std::to_string(c.s_star)},
          {"k_verified", std::to_string(c.k_verified)}};
}

Report describe(const Theorem1Report& r) {
  return {{"hypothesis_rsc_rss", yes_no(r.rsc_rss_verified)},
          {"hypothesis_threshold", yes_no(r.threshold_ok)},
          {"required_threshold", fmt(r.required_threshold)},
          {"hypothesis_signal", yes_no(r.signal_ok)},
          {"required_signal", fmt(r.required_signal)},
          {"min_signal", fmt(r.min_signal)},
          {"hypotheses", yes_no(r.hypotheses())},
          {"a_error", fmt(r.error)},
          {"a_error_bound", fmt(r.error_bound)},
          {"a_error_bound_holds", yes_no(r.error_bound_ok)},
          {"b_false_exclusions", std::to_string(r.false_exclusions)},
          {"c_false_inclusions", std::to_string(r.false_inclusions)},
          {"stopping_size_ok", yes_no(r.stopping_size_ok)},
          {"hard_failure", yes_no(r.hard_failure())}};
}

std::string format_report(const Report& report) {
  std::string out;
  for (const auto& [k, v] : report) out += k + ": " + v + "\n";
  return out;
}

}  // namespace fbgreedy
