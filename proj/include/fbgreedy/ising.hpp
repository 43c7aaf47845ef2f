#pragma once

#include "fbgreedy/edge_set.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fbgreedy {

// Pairwise binary Ising model
//   P(x) ∝ exp( sum_r theta_r x_r + sum_{(r,t)} theta_rt x_r x_t ),  x ∈ {-1,+1}^p.
class IsingModel {
 public:
  explicit IsingModel(std::size_t p);

  std::size_t nodes() const noexcept { return fields_.size(); }

  double field(std::size_t r) const { return fields_.at(r); }
  void set_field(std::size_t r, double v) { fields_.at(r) = v; }

  // Symmetric: coupling(r, t) == coupling(t, r); zero means no edge.
  double coupling(std::size_t r, std::size_t t) const;
  void set_coupling(std::size_t r, std::size_t t, double v);

  const std::map<Edge, double>& couplings() const noexcept { return couplings_; }
  EdgeSet edge_set() const;
  std::size_t max_degree() const { return edge_set().max_degree(); }

  // theta_r + sum_t theta_rt x_t, the local field acting on node r.
  double local_field(std::size_t r, std::span<const int> x) const;
  double energy(std::span<const int> x) const;

  // Adjacency lists for fast sweeps: (neighbor, coupling).
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const;

 private:
  std::vector<double> fields_;
  std::map<Edge, double> couplings_;
};

enum class Topology { chain, grid4, star };

std::string to_string(Topology t);
Topology parse_topology(const std::string& s);

EdgeSet make_chain(std::size_t p);
EdgeSet make_grid4(std::size_t p);
EdgeSet make_star(std::size_t p, std::size_t hub_degree);

// Hub degree used for the "d = 0.1 p" star: ceil(0.1 p), at least 1.
std::size_t default_star_hub_degree(std::size_t p);

EdgeSet make_topology(Topology t, std::size_t p, std::size_t hub_degree = 0);

// Every skeleton edge gets +omega or -omega with probability 1/2; fields are 0.
IsingModel assign_couplings(const EdgeSet& skeleton, double omega, std::uint64_t seed);

// Exact probabilities over all 2^p states (p <= 15). State index s encodes
// x_r = +1 iff bit r of s is set.
std::vector<double> exact_distribution(const IsingModel& model);
std::vector<int> state_from_index(std::uint64_t s, std::size_t p);

struct GibbsSettings {
  std::size_t burn_in_sweeps = 200;
  std::size_t thin_sweeps = 10;
  std::uint64_t seed = 0;
};

// n x p matrix of ±1 spins, row-major.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  // Throws NonBinaryData unless every entry is -1 or +1.
  SampleMatrix(std::size_t n, std::size_t p, std::vector<std::int8_t> entries);

  std::size_t samples() const noexcept { return n_; }
  std::size_t nodes() const noexcept { return p_; }
  int operator()(std::size_t i, std::size_t r) const { return entries_[i * p_ + r]; }
  std::span<const std::int8_t> row(std::size_t i) const {
    return {entries_.data() + i * p_, p_};
  }
  const std::vector<std::int8_t>& entries() const noexcept { return entries_; }

  // Rows [first, first + count).
  SampleMatrix slice_rows(std::size_t first, std::size_t count) const;
  // Columns reordered so new column c is old column order[c].
  SampleMatrix permute_columns(std::span<const std::size_t> order) const;

  // Free-form provenance (seed, sampler settings, graph type, ...).
  std::map<std::string, std::string> provenance;

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<std::int8_t> entries_;
};

// Systematic-scan Gibbs sampler started from a uniform random state:
// burn_in_sweeps sweeps, then one recorded sample every thin_sweeps sweeps.
SampleMatrix gibbs_sample(const IsingModel& model, std::size_t n, const GibbsSettings& settings);

// P(x_r = +1 | x_rest) used by the sampler's site update.
double spin_up_probability(const IsingModel& model, std::size_t r, std::span<const int> x);

// CSV of ±1 integers, one sample per row, no header. The sidecar "<path>.json"
// carries the provenance map.
void write_samples(const std::string& path, const SampleMatrix& data);
SampleMatrix read_samples(const std::string& path);

}  // namespace fbgreedy
