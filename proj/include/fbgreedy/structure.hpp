#pragma once

#include "fbgreedy/edge_set.hpp"
#include "fbgreedy/greedy.hpp"
#include "fbgreedy/ising.hpp"
#include "fbgreedy/losses.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fbgreedy {

enum class CombineRule { OR, AND };

struct L1SolverLog {
  double lambda = 0.0;
  std::size_t iterations = 0;
  double optimality_gap = 0.0;  // sup-norm of the composite gradient mapping at exit
};

struct NeighborhoodEstimate {
  std::size_t node = 0;
  std::vector<std::size_t> neighbors;  // global node ids, ascending
  std::vector<double> coefficients;    // node-local layout
  std::optional<GreedyTrace> trace;
  std::optional<L1SolverLog> l1_log;
};

struct StructureEstimate {
  EdgeSet edges;
  std::vector<NeighborhoodEstimate> neighborhoods;  // indexed by node
};

// Forward-backward greedy on node r's conditional loss. Errors are rethrown
// as NodeFailure carrying r.
NeighborhoodEstimate greedy_neighborhood(const SampleMatrix& data, std::size_t node,
                                         const GreedyConfig& config);

// One estimate per node is required (MissingNode otherwise).
EdgeSet combine(std::span<const NeighborhoodEstimate> estimates, CombineRule rule, std::size_t p);

StructureEstimate learn_structure(const SampleMatrix& data, const GreedyConfig& config,
                                  CombineRule rule = CombineRule::OR, std::size_t threads = 0);

// Threshold eps_S = c log(n p) / n.
double greedy_threshold(double c, std::size_t n, std::size_t p);

// ---------------------------------------------------------------------------
// l1-regularized logistic baseline

struct L1Options {
  double tol = 1e-7;
  std::size_t max_iter = 5000;
  double support_threshold = 1e-6;
  bool include_intercept = false;
};

struct L1Solution {
  Eigen::VectorXd coefficients;
  L1SolverLog log;
};

// argmin L(theta) + lambda * ||theta_couplings||_1 by accelerated proximal
// gradient with backtracking and adaptive restart.
L1Solution solve_l1_logistic(const NodeConditionalLogisticLoss& loss, double lambda,
                             const L1Options& options = {});

// Largest violation of the l1 subgradient optimality conditions.
double l1_subgradient_violation(const NodeConditionalLogisticLoss& loss,
                                std::span<const double> theta, double lambda);

NeighborhoodEstimate l1_logistic_neighborhood(const SampleMatrix& data, std::size_t node,
                                              double lambda, const L1Options& options = {});

StructureEstimate learn_structure_l1(const SampleMatrix& data, double lambda,
                                     CombineRule rule = CombineRule::OR,
                                     const L1Options& options = {}, std::size_t threads = 0);

// lambda = c' sqrt(log p / n).
double l1_lambda(double c_prime, std::size_t n, std::size_t p);

// Picks c' from `candidates` by fitting every node on the first
// (1 - holdout) fraction of rows and scoring the summed conditional
// log-likelihood on the rest. Ties keep the earlier candidate.
struct L1Selection {
  double c_prime = 0.0;
  std::vector<double> heldout_loss;  // per candidate, summed over nodes
};
L1Selection select_l1_constant(const SampleMatrix& data, std::span<const double> candidates,
                               double holdout = 0.2, const L1Options& options = {});

inline constexpr double kDefaultL1Candidates[] = {0.25, 0.5, 1.0, 2.0, 4.0};

}  // namespace fbgreedy
