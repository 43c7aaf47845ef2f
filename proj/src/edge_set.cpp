#include "fbgreedy/edge_set.hpp"

#include "fbgreedy/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fbgreedy {

void EdgeSet::insert(std::size_t a, std::size_t b) {
  if (a == b) throw InvalidArgument("self-loop at node " + std::to_string(a));
  if (a >= p_ || b >= p_) throw InvalidArgument("edge endpoint out of range");
  edges_.emplace(std::min(a, b), std::max(a, b));
}

bool EdgeSet::contains(std::size_t a, std::size_t b) const {
  return edges_.count({std::min(a, b), std::max(a, b)}) != 0;
}

std::vector<std::size_t> EdgeSet::degrees() const {
  std::vector<std::size_t> deg(p_, 0);
  for (const auto& [a, b] : edges_) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

std::size_t EdgeSet::max_degree() const {
  const auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

std::vector<std::size_t> EdgeSet::neighbors(std::size_t r) const {
  std::vector<std::size_t> out;
  for (const auto& [a, b] : edges_) {
    if (a == r) out.push_back(b);
    else if (b == r) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

EdgeComparison compare_edges(const EdgeSet& truth, const EdgeSet& estimate) {
  EdgeComparison c;
  for (const auto& e : truth)
    if (!estimate.contains(e.first, e.second)) ++c.missed;
  for (const auto& e : estimate)
    if (!truth.contains(e.first, e.second)) ++c.extra;
  return c;
}

std::string format_edges(const EdgeSet& edges) {
  std::ostringstream os;
  os << "p " << edges.nodes() << '\n';
  for (const auto& [a, b] : edges) os << a << ' ' << b << '\n';
  return os.str();
}

EdgeSet parse_edges(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  std::size_t p = 0;
  if (!(is >> tag >> p) || tag != "p") throw IoFailure("edge list must start with 'p <nodes>'");
  EdgeSet out(p);
  long long a = 0, b = 0;
  while (is >> a >> b) {
    if (a < 0 || b < 0) throw IoFailure("negative node id in edge list");
    out.insert(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  if (!is.eof()) throw IoFailure("malformed edge list");
  return out;
}

void write_edges(const std::string& path, const EdgeSet& edges) {
  std::ofstream os(path);
  if (!os) throw IoFailure("cannot open " + path + " for writing");
  os << format_edges(edges);
  if (!os) throw IoFailure("failed writing " + path);
}

EdgeSet read_edges(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_edges(buf.str());
}

}  // namespace fbgreedy
