#include "fbgreedy/losses.hpp"

#include "fbgreedy/errors.hpp"

#include <cmath>
#include <string>

namespace fbgreedy {

CoordinateLine SmoothLoss::along(std::span<const double> theta, std::size_t j) const {
  std::vector<double> base(theta.begin(), theta.end());
  return [this, base = std::move(base), j](double alpha) mutable {
    const double saved = base[j];
    base[j] = saved + alpha;
    const std::size_t coord[1] = {j};
    LinePoint pt{value(base), gradient(base)[static_cast<Eigen::Index>(j)],
                 restricted_hessian(base, coord)(0, 0)};
    base[j] = saved;
    return pt;
  };
}

Eigen::MatrixXd SmoothLoss::hessian(std::span<const double> theta) const {
  std::vector<std::size_t> all(dimension());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return restricted_hessian(theta, all);
}

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> theta) {
  return {theta.data(), static_cast<Eigen::Index>(theta.size())};
}

void check_dim(std::span<const double> theta, std::size_t p) {
  if (theta.size() != p)
    throw InvalidArgument("parameter has dimension " + std::to_string(theta.size()) +
                          ", loss expects " + std::to_string(p));
}

}  // namespace

// ---------------------------------------------------------------------------
// Squared loss

SquaredLoss::SquaredLoss(Eigen::MatrixXd design, Eigen::VectorXd response)
    : design_(std::move(design)), response_(std::move(response)) {
  if (design_.rows() == 0 || design_.rows() != response_.size())
    throw InvalidArgument("squared loss: design rows must match a non-empty response");
  gram_ = design_.transpose() * design_ / static_cast<double>(design_.rows());
}

Eigen::VectorXd SquaredLoss::residual(std::span<const double> theta) const {
  check_dim(theta, dimension());
  return response_ - design_ * as_vector(theta);
}

double SquaredLoss::value(std::span<const double> theta) const {
  return residual(theta).squaredNorm() / (2.0 * static_cast<double>(samples()));
}

Eigen::VectorXd SquaredLoss::gradient(std::span<const double> theta) const {
  return -design_.transpose() * residual(theta) / static_cast<double>(samples());
}

Eigen::MatrixXd SquaredLoss::restricted_hessian(std::span<const double>,
                                                std::span<const std::size_t> coords) const {
  const auto k = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd h(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      h(a, b) = gram_(static_cast<Eigen::Index>(coords[a]), static_cast<Eigen::Index>(coords[b]));
  return h;
}

CoordinateLine SquaredLoss::along(std::span<const double> theta, std::size_t j) const {
  const double n = static_cast<double>(samples());
  Eigen::VectorXd r = residual(theta);
  const auto col = static_cast<Eigen::Index>(j);
  const double base = r.squaredNorm() / (2.0 * n);
  const double cross = design_.col(col).dot(r) / n;
  const double curv = gram_(col, col);
  return [base, cross, curv](double alpha) {
    return LinePoint{base - alpha * cross + 0.5 * curv * alpha * alpha, -cross + curv * alpha,
                     curv};
  };
}

// ---------------------------------------------------------------------------
// Node-conditional logistic loss

double logistic(double m) noexcept {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

namespace {
const double kLog2 = std::log(2.0);
}  // namespace

double conditional_nll_term(double m) noexcept {
  // log(1 + e^m) - m == log1p(e^-m)
  if (m > 30.0) return std::log1p(std::exp(-m));
  if (m < -30.0) return -m + std::log1p(std::exp(m));
  return m >= 0 ? std::log1p(std::exp(-m)) : std::log1p(std::exp(m)) - m;
}

NodeConditionalLogisticLoss::NodeConditionalLogisticLoss(const SampleMatrix& data,
                                                         std::size_t node,
                                                         bool include_intercept)
    : node_(node), p_(data.nodes()), intercept_(include_intercept) {
  if (data.samples() == 0) throw InvalidArgument("conditional loss needs at least one sample");
  if (p_ < 2) throw InvalidArgument("conditional loss needs at least two nodes");
  if (node >= p_) throw InvalidArgument("node index out of range");
  const auto n = static_cast<Eigen::Index>(data.samples());
  const auto dim = static_cast<Eigen::Index>(p_ - 1 + (intercept_ ? 1 : 0));
  features_.resize(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = data.row(static_cast<std::size_t>(i));
    const double xr = row[node];
    Eigen::Index j = 0;
    for (std::size_t t = 0; t < p_; ++t) {
      if (t == node) continue;
      features_(i, j++) = xr * row[t];
    }
    if (intercept_) features_(i, j) = xr;
  }
}

std::size_t NodeConditionalLogisticLoss::global_index(std::size_t local) const {
  if (local >= p_ - 1) throw InvalidArgument("local index is not a coupling coordinate");
  return local < node_ ? local : local + 1;
}

std::optional<std::size_t> NodeConditionalLogisticLoss::local_index(std::size_t global) const {
  if (global == node_ || global >= p_) return std::nullopt;
  return global < node_ ? global : global - 1;
}

std::vector<std::size_t> NodeConditionalLogisticLoss::fixed_coordinates() const {
  if (!intercept_) return {};
  return {p_ - 1};
}

Eigen::VectorXd NodeConditionalLogisticLoss::margins(std::span<const double> theta) const {
  check_dim(theta, dimension());
  return features_ * as_vector(theta);
}

double NodeConditionalLogisticLoss::value(std::span<const double> theta) const {
  const Eigen::VectorXd m = margins(theta);
  // Terms are accumulated relative to log 2 so that L(0) is exactly log 2.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) acc += conditional_nll_term(m[i]) - kLog2;
  return kLog2 + acc / static_cast<double>(m.size());
}

Eigen::VectorXd NodeConditionalLogisticLoss::gradient(std::span<const double> theta) const {
  const Eigen::VectorXd m = margins(theta);
  Eigen::VectorXd w(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) w[i] = logistic(m[i]) - 1.0;
  return features_.transpose() * w / static_cast<double>(m.size());
}

Eigen::MatrixXd NodeConditionalLogisticLoss::restricted_hessian(
    std::span<const double> theta, std::span<const std::size_t> coords) const {
  const Eigen::VectorXd m = margins(theta);
  const auto k = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd z(m.size(), k);
  for (Eigen::Index a = 0; a < k; ++a) z.col(a) = features_.col(static_cast<Eigen::Index>(coords[a]));
  Eigen::VectorXd w(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double s = logistic(m[i]);
    w[i] = s * (1.0 - s);
  }
  return z.transpose() * w.asDiagonal() * z / static_cast<double>(m.size());
}

CoordinateLine NodeConditionalLogisticLoss::along(std::span<const double> theta,
                                                  std::size_t j) const {
  Eigen::VectorXd base = margins(theta);
  Eigen::VectorXd dir = features_.col(static_cast<Eigen::Index>(j));
  return [base = std::move(base), dir = std::move(dir)](double alpha) {
    double v = 0.0, g = 0.0, h = 0.0;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      const double m = base[i] + alpha * dir[i];
      const double s = logistic(m);
      v += conditional_nll_term(m) - kLog2;
      g += dir[i] * (s - 1.0);
      h += dir[i] * dir[i] * s * (1.0 - s);
    }
    const double n = static_cast<double>(base.size());
    return LinePoint{kLog2 + v / n, g / n, h / n};
  };
}

double NodeConditionalLogisticLoss::implied_conditional(std::span<const double> theta,
                                                        std::span<const int> x) const {
  check_dim(theta, dimension());
  if (x.size() != p_) throw InvalidArgument("configuration has wrong length");
  // With x_r = +1 the margin is theta_r + sum_t theta_rt x_t; the per-sample
  // loss log(1 + e^-m) is -log logistic(m).
  double eta = intercept_ ? theta[p_ - 1] : 0.0;
  for (std::size_t t = 0; t < p_; ++t)
    if (t != node_) eta += theta[*local_index(t)] * x[t];
  return logistic(eta);
}

namespace {

void require_binary(const SampleMatrix& data) {
  for (auto v : data.entries())
    if (v != 1 && v != -1) throw NonBinaryData("sample entries must be -1 or +1");
}

bool with_intercept(std::span<const double> theta, const SampleMatrix& data) {
  if (theta.size() == data.nodes() - 1) return false;
  if (theta.size() == data.nodes()) return true;
  throw InvalidArgument("theta must have p - 1 or p coordinates");
}

}  // namespace

double logistic_value(std::span<const double> theta, std::size_t node, const SampleMatrix& data) {
  require_binary(data);
  return NodeConditionalLogisticLoss(data, node, with_intercept(theta, data)).value(theta);
}

Eigen::VectorXd logistic_gradient(std::span<const double> theta, std::size_t node,
                                  const SampleMatrix& data) {
  require_binary(data);
  return NodeConditionalLogisticLoss(data, node, with_intercept(theta, data)).gradient(theta);
}

}  // namespace fbgreedy
