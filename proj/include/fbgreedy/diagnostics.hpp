#pragma once

#include "fbgreedy/greedy.hpp"
#include "fbgreedy/param_vector.hpp"
#include "fbgreedy/smooth_loss.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fbgreedy {

struct RscRss {
  double kappa_l = 0.0;  // restricted strong convexity
  double kappa_u = 0.0;  // restricted smoothness
};

struct TheoryConstants {
  double kappa_l = 0.0;
  double kappa_u = 0.0;
  double rho = 0.0;       // kappa_u / kappa_l
  double lambda_n = 0.0;  // ||grad L(theta*)||_inf
  double eta = 0.0;       // sparsity inflation factor
  std::size_t s_star = 0;
  std::size_t k_verified = 0;  // support size the kappas were certified for
};

// Extreme eigenvalues of the Hessian restricted to every support of size
// min(k, p), at every probe point. By eigenvalue interlacing those bound all
// smaller supports too. Exact RSC/RSS for quadratic losses; a local
// certificate at the probes otherwise. Requires p <= 20.
RscRss estimate_rsc_rss(const SmoothLoss& loss, std::size_t k,
                        std::span<const ParamVector> probe_points);

double measure_noise_level(const SmoothLoss& loss, const ParamVector& theta_star);

// 2 + 4 rho^2 (sqrt((rho^2 - rho) / s*) + sqrt(2))^2, with s* = 0 read as 1.
double eta_lower_bound(double rho, std::size_t s_star);

// The origin, theta*, theta_hat (when given) and `random_count` random points
// with at most `sparsity` nonzeros drawn from [-1, 1].
std::vector<ParamVector> default_probe_points(std::size_t dim, const ParamVector& theta_star,
                                              const std::optional<ParamVector>& theta_hat,
                                              std::size_t sparsity, std::uint64_t seed,
                                              std::size_t random_count = 10);

// Grows the certified support size until it covers ceil(eta * s*) (or p),
// recomputing eta from the current rho each time.
TheoryConstants estimate_theory_constants(const SmoothLoss& loss, const ParamVector& theta_star,
                                          std::span<const ParamVector> probe_points);

struct Theorem1Report {
  // Hypotheses
  bool rsc_rss_verified = false;
  bool threshold_ok = false;  // eps_S >= (8 rho eta / kappa_l) s* lambda_n^2
  bool signal_ok = false;     // min |theta*_j| > sqrt(32 rho eps_S / kappa_l)
  bool hypotheses() const { return rsc_rss_verified && threshold_ok && signal_ok; }

  // Conclusions
  double error = 0.0;
  double error_bound = 0.0;
  bool error_bound_ok = false;  // (a)
  std::size_t false_exclusions = 0;
  std::size_t false_inclusions = 0;
  bool no_false_exclusions() const { return false_exclusions == 0; }  // (b)
  bool no_false_inclusions() const { return false_inclusions == 0; }  // (c)
  bool conclusions() const {
    return error_bound_ok && no_false_exclusions() && no_false_inclusions();
  }

  // Hypotheses satisfied but a conclusion failed.
  bool hard_failure() const { return hypotheses() && !conclusions(); }

  // |S_hat| <= (eta - 1) s* at termination.
  bool stopping_size_ok = false;

  double required_threshold = 0.0;
  double required_signal = 0.0;
  double min_signal = 0.0;
};

Theorem1Report check_theorem1(const GreedyResult& result, const ParamVector& theta_star,
                              const std::optional<TheoryConstants>& constants, double eps_s);

// ||theta_hat - theta*||^2 restricted to S_hat \ S* must be at least
// (eps_S / (inflation * kappa_u)) |S_hat \ S*| when the backward step has
// stopped with nu = 1/2.
bool backward_stop_inequality(const GreedyResult& result, const ParamVector& theta_star,
                              double kappa_u, double eps_s, double inflation = 1.1);

// "key: value" lines, keys in insertion order.
using Report = std::vector<std::pair<std::string, std::string>>;
Report describe(const TheoryConstants& c);
Report describe(const Theorem1Report& r);
std::string format_report(const Report& report);

}  // namespace fbgreedy
