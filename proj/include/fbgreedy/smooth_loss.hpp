#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fbgreedy {

// Value and first two derivatives of a loss restricted to a line.
struct LinePoint {
  double value;
  double slope;
  double curvature;
};

// phi(alpha) = L(theta + alpha * e_j), evaluated with whatever caching the
// loss can offer.
using CoordinateLine = std::function<LinePoint(double alpha)>;

// Contract for a smooth loss L(theta; data). Implementations hold an immutable
// view of their data and are safe for concurrent reads.
class SmoothLoss {
 public:
  virtual ~SmoothLoss() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> theta) const = 0;
  virtual Eigen::VectorXd gradient(std::span<const double> theta) const = 0;

  // Hessian restricted to `coords` (rows and columns in the order given).
  virtual Eigen::MatrixXd restricted_hessian(std::span<const double> theta,
                                             std::span<const std::size_t> coords) const = 0;

  // Restriction of the loss to the coordinate line through theta along e_j.
  virtual CoordinateLine along(std::span<const double> theta, std::size_t j) const;

  // True when the loss is exactly quadratic, so one Newton step is exact.
  virtual bool is_quadratic() const { return false; }

  // Coordinates that are always optimized but never selected or removed by
  // the greedy search (e.g. an intercept).
  virtual std::vector<std::size_t> fixed_coordinates() const { return {}; }

  Eigen::MatrixXd hessian(std::span<const double> theta) const;
};

}  // namespace fbgreedy
