#pragma once

#include "fbgreedy/param_vector.hpp"
#include "fbgreedy/smooth_loss.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fbgreedy {

struct GreedyConfig {
  double stop_threshold = 0.0;   // epsilon_S, loss units
  double backward_factor = 0.5;  // nu in (0, 1)
  std::size_t max_support = 0;   // 0 means "dimension of the loss"
  double inner_tol = 1e-8;       // sup-norm of the restricted gradient
  std::size_t inner_max_iter = 100;
  double line_search_tol = 1e-8;  // |phi'(alpha)| at the 1-D minimizer

  // Throws InvalidArgument when a field is out of range for a loss of
  // dimension p.
  void validate(std::size_t p) const;
  std::size_t support_cap(std::size_t p) const;
};

// min(p, 4 * ceil(expected_sparsity)).
std::size_t default_max_support(std::size_t p, double expected_sparsity);

struct ForwardMove {
  std::size_t index;
  double step;
  double gain;  // L(theta) - L(theta + step e_index) >= 0
};

struct BackwardMove {
  std::size_t index;
  double increase;  // L(theta - theta_index e_index) - L(theta)
};

enum class StepKind { forward, backward };

struct TraceStep {
  StepKind kind;
  std::size_t index;
  std::size_t size_after;
  double gain;  // forward gain; 0 for backward records
  double loss_after;
};

struct GreedyTrace {
  std::vector<TraceStep> steps;
  // gain_by_size[k] = forward gain recorded the last time a forward step
  // brought the support to size k (index 0 unused).
  std::vector<double> gain_by_size;
  double initial_loss = 0.0;

  std::size_t forward_count() const;
  std::size_t backward_count() const;
};

struct GreedyResult {
  ParamVector theta_hat;
  std::vector<std::size_t> active;  // selected coordinates, ascending (fixed ones excluded)
  GreedyTrace trace;
  double terminal_forward_gain = 0.0;
  bool support_cap_reached = false;
  double final_loss = 0.0;
};

// Best single-coordinate move among inactive, non-fixed coordinates.
ForwardMove forward_search(const SmoothLoss& loss, const ParamVector& theta,
                           std::span<const std::size_t> active, const GreedyConfig& config);
ForwardMove forward_search(const SmoothLoss& loss, const ParamVector& theta,
                           const GreedyConfig& config = {});

// Minimizer of L along e_j from theta; returns (step, value at the minimizer).
std::pair<double, double> minimize_along(const SmoothLoss& loss, const ParamVector& theta,
                                         std::size_t j, const GreedyConfig& config);

// argmin of L over coefficients supported on `support` plus the loss's fixed
// coordinates, by damped Newton. `warm_start` seeds the iteration.
ParamVector refit(const SmoothLoss& loss, std::span<const std::size_t> support,
                  const GreedyConfig& config = {},
                  const std::optional<ParamVector>& warm_start = std::nullopt);

BackwardMove backward_scan(const SmoothLoss& loss, const ParamVector& theta,
                           std::span<const std::size_t> active);
BackwardMove backward_scan(const SmoothLoss& loss, const ParamVector& theta);

GreedyResult run_greedy(const SmoothLoss& loss, const GreedyConfig& config);

// Post-hoc audit of a run against the forward-backward guarantees:
//  - each visit to a support size k after the first lowers the loss recorded
//    at that size by at least (1 - nu) eps_S, and every round that ends at
//    size k-1 or k (at most one removal) lowers the loss by that much;
//  - every forward record has gain > eps_S;
//  - forward steps <= (L(0) - L_final) / ((1 - nu) eps_S) + 1;
//  - terminal forward gain <= eps_S + line_search_tol, recomputed here;
//  - removing any active coordinate at the end costs more than nu * gain_by_size[k].
struct ContractReport {
  bool ok = true;
  std::vector<std::string> violations;
  double min_round_decrease = 0.0;  // smallest decrease over audited rounds
  double recomputed_forward_gain = 0.0;
  std::optional<double> terminal_backward_increase;
  // With nu = 1/2, whether the terminal backward increase also exceeds
  // eps_S / 2 (the weaker form used in the analysis). Reported, never enforced.
  std::optional<bool> half_threshold_backward;
};

ContractReport audit_greedy(const SmoothLoss& loss, const GreedyConfig& config,
                            const GreedyResult& result, double slack = 1e-9);

}  // namespace fbgreedy
