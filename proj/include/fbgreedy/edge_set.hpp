#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fbgreedy {

using Edge = std::pair<std::size_t, std::size_t>;

// Undirected simple graph over nodes 0..p-1. Edges are stored as (min, max).
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t p) : p_(p) {}

  std::size_t nodes() const noexcept { return p_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  // Throws InvalidArgument on self-loops or out-of-range endpoints.
  void insert(std::size_t a, std::size_t b);
  bool contains(std::size_t a, std::size_t b) const;

  const std::set<Edge>& edges() const noexcept { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  std::vector<std::size_t> degrees() const;
  std::size_t max_degree() const;
  std::vector<std::size_t> neighbors(std::size_t r) const;

  bool operator==(const EdgeSet&) const = default;

 private:
  std::size_t p_ = 0;
  std::set<Edge> edges_;
};

struct EdgeComparison {
  std::size_t missed = 0;  // in truth, not in estimate
  std::size_t extra = 0;   // in estimate, not in truth
  bool exact() const noexcept { return missed == 0 && extra == 0; }
};

EdgeComparison compare_edges(const EdgeSet& truth, const EdgeSet& estimate);

// Text form: first line "p <p>", then one sorted "r t" pair per line (0-based).
std::string format_edges(const EdgeSet& edges);
EdgeSet parse_edges(const std::string& text);
void write_edges(const std::string& path, const EdgeSet& edges);
EdgeSet read_edges(const std::string& path);

}  // namespace fbgreedy
