#pragma once

#include <fbgreedy/greedy.hpp>
#include <fbgreedy/ising.hpp>
#include <fbgreedy/losses.hpp>
#include <fbgreedy/rng.hpp>

#include "oracles.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fixture {

inline fbgreedy::SampleMatrix to_samples(const oracle::Spins& rows) {
  const std::size_t p = rows.front().size();
  std::vector<std::int8_t> e;
  for (const auto& r : rows)
    for (int v : r) e.push_back(static_cast<std::int8_t>(v));
  return fbgreedy::SampleMatrix(rows.size(), p, std::move(e));
}

inline oracle::Spins to_rows(const fbgreedy::SampleMatrix& m) {
  oracle::Spins rows(m.samples(), std::vector<int>(m.nodes()));
  for (std::size_t i = 0; i < m.samples(); ++i)
    for (std::size_t r = 0; r < m.nodes(); ++r) rows[i][r] = m(i, r);
  return rows;
}

inline oracle::Spins random_spins(std::size_t n, std::size_t p, std::uint64_t seed) {
  fbgreedy::CounterRng rng(seed);
  oracle::Spins rows(n, std::vector<int>(p));
  for (auto& r : rows)
    for (int& v : r) v = rng.coin() ? 1 : -1;
  return rows;
}

// Spins with a shared latent sign so columns are correlated; used where a
// fixture needs non-trivial gradients.
inline oracle::Spins correlated_spins(std::size_t n, std::size_t p, double agree,
                                      std::uint64_t seed) {
  fbgreedy::CounterRng rng(seed);
  oracle::Spins rows(n, std::vector<int>(p));
  for (auto& r : rows) {
    const int z = rng.coin() ? 1 : -1;
    for (int& v : r) v = rng.uniform() < agree ? z : -z;
  }
  return rows;
}

// p = 4 nodes, n = 8; node 0's loss has three coordinates with distinct,
// finite 1-D minimizers.
inline const oracle::Spins kForwardFixture = {
    {+1, +1, +1, -1}, {+1, +1, +1, +1}, {-1, -1, -1, -1}, {-1, +1, -1, +1},
    {+1, -1, +1, +1}, {-1, -1, +1, -1}, {+1, +1, +1, +1}, {-1, -1, -1, +1},
};

// p = 3 nodes, n = 6; node 0's loss is strictly convex with a finite minimizer.
inline const oracle::Spins kRefitFixture = {
    {+1, +1, +1}, {-1, -1, -1}, {+1, +1, +1}, {+1, +1, -1}, {+1, -1, +1}, {-1, +1, +1},
};

struct SquaredInstance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<double> theta_star;
};

// Noiseless orthonormal design with s nonzeros of magnitude in [0.5, 2].
inline SquaredInstance orthonormal_instance(std::size_t p, std::size_t s, std::uint64_t seed) {
  SquaredInstance inst;
  inst.X = oracle::orthonormal_design(2 * p, p, fbgreedy::CounterRng::stream_key(seed, 0));
  fbgreedy::CounterRng rng(fbgreedy::CounterRng::stream_key(seed, 1));
  inst.theta_star.assign(p, 0.0);
  std::vector<std::size_t> idx(p);
  for (std::size_t j = 0; j < p; ++j) idx[j] = j;
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.uniform() * static_cast<double>(p - k));
    std::swap(idx[k], idx[pick]);
    const double mag = 0.5 + 1.5 * rng.uniform();
    inst.theta_star[idx[k]] = rng.coin() ? mag : -mag;
  }
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(inst.theta_star.data(),
                                                        static_cast<Eigen::Index>(p));
  inst.y = inst.X * t;
  return inst;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "; ";
  return s;
}

}  // namespace fixture
