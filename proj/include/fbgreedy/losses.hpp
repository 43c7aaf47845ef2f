#pragma once

#include "fbgreedy/ising.hpp"
#include "fbgreedy/smooth_loss.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fbgreedy {

// L(theta) = ||y - X theta||^2 / (2n).
class SquaredLoss final : public SmoothLoss {
 public:
  SquaredLoss(Eigen::MatrixXd design, Eigen::VectorXd response);

  std::size_t dimension() const override { return static_cast<std::size_t>(design_.cols()); }
  double value(std::span<const double> theta) const override;
  Eigen::VectorXd gradient(std::span<const double> theta) const override;
  Eigen::MatrixXd restricted_hessian(std::span<const double> theta,
                                     std::span<const std::size_t> coords) const override;
  CoordinateLine along(std::span<const double> theta, std::size_t j) const override;
  bool is_quadratic() const override { return true; }

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::VectorXd& response() const noexcept { return response_; }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(design_.rows()); }

 private:
  Eigen::VectorXd residual(std::span<const double> theta) const;

  Eigen::MatrixXd design_;
  Eigen::VectorXd response_;
  Eigen::MatrixXd gram_;  // X^T X / n
};

// Numerically stable log(1 + e^m) - m.
double conditional_nll_term(double margin) noexcept;

// Standard logistic function.
double logistic(double m) noexcept;

// Negative conditional log-likelihood of node r given the rest:
//
//   L(theta) = (1/n) sum_i [ log(1 + exp(m_i)) - m_i ],
//   m_i = theta_r x_r^(i) + sum_{t != r} theta_rt x_r^(i) x_t^(i).
//
// The field term multiplies x_r^(i) (the node's own spin), mirroring the
// subtracted term. Coupling coordinates use the node-local layout: local
// index j <-> the j-th node t != r in ascending order. With an intercept the
// field theta_r is the last coordinate and is reported as fixed.
//
// Minimizers of this loss estimate 2 * theta* for data from the Ising model
// P(x) ∝ exp(sum theta_r x_r + sum theta_rt x_r x_t), since
// P(x_r | rest) = logistic(2 x_r (theta_r + sum_t theta_rt x_t)).
class NodeConditionalLogisticLoss final : public SmoothLoss {
 public:
  NodeConditionalLogisticLoss(const SampleMatrix& data, std::size_t node,
                              bool include_intercept = false);

  std::size_t dimension() const override { return static_cast<std::size_t>(features_.cols()); }
  double value(std::span<const double> theta) const override;
  Eigen::VectorXd gradient(std::span<const double> theta) const override;
  Eigen::MatrixXd restricted_hessian(std::span<const double> theta,
                                     std::span<const std::size_t> coords) const override;
  CoordinateLine along(std::span<const double> theta, std::size_t j) const override;
  std::vector<std::size_t> fixed_coordinates() const override;

  std::size_t node() const noexcept { return node_; }
  std::size_t nodes() const noexcept { return p_; }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  bool has_intercept() const noexcept { return intercept_; }

  // Node-local coupling index -> global node id, and back.
  std::size_t global_index(std::size_t local) const;
  std::optional<std::size_t> local_index(std::size_t global) const;

  // Margins m_i for every sample.
  Eigen::VectorXd margins(std::span<const double> theta) const;

  // P(x_r = +1 | x_rest) implied by the loss parameters for one configuration.
  double implied_conditional(std::span<const double> theta, std::span<const int> x) const;

 private:
  std::size_t node_;
  std::size_t p_;
  bool intercept_;
  Eigen::MatrixXd features_;  // column j = x_r * x_t(j); intercept column = x_r
};

// Free-function forms over raw data. theta uses the node-local layout
// (p - 1 coupling coordinates, optionally followed by the field).
double logistic_value(std::span<const double> theta, std::size_t node, const SampleMatrix& data);
Eigen::VectorXd logistic_gradient(std::span<const double> theta, std::size_t node,
                                  const SampleMatrix& data);

}  // namespace fbgreedy
