#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbgreedy {

// Dense coefficient vector whose support is, by construction, exactly its
// nonzero index set (ascending).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim) : coeffs_(dim, 0.0) {}
  explicit ParamVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t dim() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t j) const { return coeffs_[j]; }
  void set(std::size_t j, double v) { coeffs_[j] = v; }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  const std::vector<double>& values() const noexcept { return coeffs_; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < coeffs_.size(); ++j)
      if (coeffs_[j] != 0.0) s.push_back(j);
    return s;
  }

  std::size_t support_size() const noexcept {
    std::size_t k = 0;
    for (double c : coeffs_) k += (c != 0.0);
    return k;
  }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> coeffs_;
};

}  // namespace fbgreedy
