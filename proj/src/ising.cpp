#include "fbgreedy/ising.hpp"

#include "fbgreedy/errors.hpp"
#include "fbgreedy/losses.hpp"
#include "fbgreedy/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fbgreedy {

IsingModel::IsingModel(std::size_t p) : fields_(p, 0.0) {}

double IsingModel::coupling(std::size_t r, std::size_t t) const {
  const auto it = couplings_.find({std::min(r, t), std::max(r, t)});
  return it == couplings_.end() ? 0.0 : it->second;
}

void IsingModel::set_coupling(std::size_t r, std::size_t t, double v) {
  if (r == t) throw InvalidArgument("Ising couplings cannot be self-loops");
  if (r >= nodes() || t >= nodes()) throw InvalidArgument("coupling endpoint out of range");
  const Edge e{std::min(r, t), std::max(r, t)};
  if (v == 0.0) couplings_.erase(e);
  else couplings_[e] = v;
}

EdgeSet IsingModel::edge_set() const {
  EdgeSet out(nodes());
  for (const auto& [e, v] : couplings_) out.insert(e.first, e.second);
  return out;
}

double IsingModel::local_field(std::size_t r, std::span<const int> x) const {
  double h = fields_[r];
  for (const auto& [e, v] : couplings_) {
    if (e.first == r) h += v * x[e.second];
    else if (e.second == r) h += v * x[e.first];
  }
  return h;
}

double IsingModel::energy(std::span<const int> x) const {
  double s = 0.0;
  for (std::size_t r = 0; r < nodes(); ++r) s += fields_[r] * x[r];
  for (const auto& [e, v] : couplings_) s += v * x[e.first] * x[e.second];
  return s;
}

std::vector<std::vector<std::pair<std::size_t, double>>> IsingModel::adjacency() const {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes());
  for (const auto& [e, v] : couplings_) {
    adj[e.first].emplace_back(e.second, v);
    adj[e.second].emplace_back(e.first, v);
  }
  return adj;
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::chain: return "chain";
    case Topology::grid4: return "grid4";
    case Topology::star: return "star";
  }
  return "unknown";
}

Topology parse_topology(const std::string& s) {
  if (s == "chain") return Topology::chain;
  if (s == "grid4" || s == "grid") return Topology::grid4;
  if (s == "star") return Topology::star;
  throw InvalidArgument("unknown topology '" + s + "'");
}

EdgeSet make_chain(std::size_t p) {
  if (p < 2) throw InvalidArgument("chain needs p >= 2");
  EdgeSet g(p);
  for (std::size_t i = 0; i + 1 < p; ++i) g.insert(i, i + 1);
  return g;
}

EdgeSet make_grid4(std::size_t p) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
  if (p < 4 || side * side != p)
    throw NotPerfectSquare("grid needs a perfect square p >= 4, got " + std::to_string(p));
  EdgeSet g(p);
  for (std::size_t row = 0; row < side; ++row)
    for (std::size_t col = 0; col < side; ++col) {
      const std::size_t v = row * side + col;
      if (col + 1 < side) g.insert(v, v + 1);
      if (row + 1 < side) g.insert(v, v + side);
    }
  return g;
}

EdgeSet make_star(std::size_t p, std::size_t hub_degree) {
  if (p < 2 || hub_degree < 1 || hub_degree > p - 1)
    throw DegreeOutOfRange("star hub degree must lie in [1, p-1]");
  EdgeSet g(p);
  for (std::size_t t = 1; t <= hub_degree; ++t) g.insert(0, t);
  return g;
}

std::size_t default_star_hub_degree(std::size_t p) {
  const auto d = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(p) - 1e-12));
  return std::max<std::size_t>(1, d);
}

EdgeSet make_topology(Topology t, std::size_t p, std::size_t hub_degree) {
  switch (t) {
    case Topology::chain: return make_chain(p);
    case Topology::grid4: return make_grid4(p);
    case Topology::star:
      return make_star(p, hub_degree == 0 ? default_star_hub_degree(p) : hub_degree);
  }
  throw InvalidArgument("unknown topology");
}

IsingModel assign_couplings(const EdgeSet& skeleton, double omega, std::uint64_t seed) {
  if (!(omega > 0.0)) throw InvalidArgument("coupling magnitude must be positive");
  IsingModel model(skeleton.nodes());
  CounterRng rng(seed);
  for (const auto& [a, b] : skeleton) model.set_coupling(a, b, rng.coin() ? omega : -omega);
  return model;
}

std::vector<int> state_from_index(std::uint64_t s, std::size_t p) {
  std::vector<int> x(p);
  for (std::size_t r = 0; r < p; ++r) x[r] = ((s >> r) & 1U) ? 1 : -1;
  return x;
}

std::vector<double> exact_distribution(const IsingModel& model) {
  const std::size_t p = model.nodes();
  if (p > 15) throw TooLarge("exact enumeration is limited to p <= 15");
  const std::uint64_t states = std::uint64_t{1} << p;
  std::vector<double> energy(states);
  double emax = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < states; ++s) {
    energy[s] = model.energy(state_from_index(s, p));
    emax = std::max(emax, energy[s]);
  }
  double z = 0.0;
  for (auto& e : energy) {
    e = std::exp(e - emax);
    z += e;
  }
  for (auto& e : energy) e /= z;
  return energy;
}

SampleMatrix::SampleMatrix(std::size_t n, std::size_t p, std::vector<std::int8_t> entries)
    : n_(n), p_(p), entries_(std::move(entries)) {
  if (entries_.size() != n * p) throw InvalidArgument("sample matrix size mismatch");
  for (auto v : entries_)
    if (v != 1 && v != -1) throw NonBinaryData("sample entries must be -1 or +1");
}

SampleMatrix SampleMatrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > n_) throw InvalidArgument("row slice out of range");
  std::vector<std::int8_t> e(entries_.begin() + static_cast<std::ptrdiff_t>(first * p_),
                             entries_.begin() + static_cast<std::ptrdiff_t>((first + count) * p_));
  SampleMatrix out(count, p_, std::move(e));
  out.provenance = provenance;
  return out;
}

SampleMatrix SampleMatrix::permute_columns(std::span<const std::size_t> order) const {
  if (order.size() != p_) throw InvalidArgument("column order must list every column");
  std::vector<std::int8_t> e(entries_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t c = 0; c < p_; ++c) e[i * p_ + c] = entries_[i * p_ + order[c]];
  SampleMatrix out(n_, p_, std::move(e));
  out.provenance = provenance;
  return out;
}

double spin_up_probability(const IsingModel& model, std::size_t r, std::span<const int> x) {
  return logistic(2.0 * model.local_field(r, x));
}

SampleMatrix gibbs_sample(const IsingModel& model, std::size_t n, const GibbsSettings& settings) {
  if (n < 1) throw InvalidArgument("gibbs_sample needs n >= 1");
  if (settings.thin_sweeps < 1) throw InvalidArgument("thin_sweeps must be at least 1");
  const std::size_t p = model.nodes();
  const auto adj = model.adjacency();
  std::vector<double> fields(p);
  for (std::size_t r = 0; r < p; ++r) fields[r] = model.field(r);

  CounterRng rng(settings.seed);
  std::vector<int> x(p);
  for (auto& v : x) v = rng.coin() ? 1 : -1;

  auto sweep = [&] {
    for (std::size_t r = 0; r < p; ++r) {
      double h = fields[r];
      for (const auto& [t, w] : adj[r]) h += w * x[t];
      x[r] = rng.uniform() < logistic(2.0 * h) ? 1 : -1;
    }
  };

  for (std::size_t s = 0; s < settings.burn_in_sweeps; ++s) sweep();
  std::vector<std::int8_t> entries;
  entries.reserve(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < settings.thin_sweeps; ++s) sweep();
    for (int v : x) entries.push_back(static_cast<std::int8_t>(v));
  }
  SampleMatrix out(n, p, std::move(entries));
  out.provenance["seed"] = std::to_string(settings.seed);
  out.provenance["burn_in_sweeps"] = std::to_string(settings.burn_in_sweeps);
  out.provenance["thin_sweeps"] = std::to_string(settings.thin_sweeps);
  out.provenance["n"] = std::to_string(n);
  out.provenance["p"] = std::to_string(p);
  return out;
}

void write_samples(const std::string& path, const SampleMatrix& data) {
  std::ofstream os(path);
  if (!os) throw IoFailure("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < data.samples(); ++i) {
    for (std::size_t r = 0; r < data.nodes(); ++r) {
      if (r) os << ',';
      os << data(i, r);
    }
    os << '\n';
  }
  if (!os) throw IoFailure("failed writing " + path);

  nlohmann::ordered_json meta;
  for (const auto& [k, v] : data.provenance) meta[k] = v;
  meta["n"] = std::to_string(data.samples());
  meta["p"] = std::to_string(data.nodes());
  std::ofstream ms(path + ".json");
  if (!ms) throw IoFailure("cannot open " + path + ".json for writing");
  ms << meta.dump(2) << '\n';
}

SampleMatrix read_samples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open " + path);
  std::vector<std::int8_t> entries;
  std::size_t p = 0, n = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ls, cell, ',')) {
      const int v = std::stoi(cell);
      if (v != 1 && v != -1)
        throw NonBinaryData(path + ":" + std::to_string(n + 1) + ": entry " + cell);
      entries.push_back(static_cast<std::int8_t>(v));
      ++cols;
    }
    if (n == 0) p = cols;
    else if (cols != p) throw IoFailure(path + ": ragged row " + std::to_string(n + 1));
    ++n;
  }
  SampleMatrix out(n, p, std::move(entries));
  std::ifstream ms(path + ".json");
  if (ms) {
    const auto meta = nlohmann::json::parse(ms, nullptr, false);
    if (meta.is_object())
      for (const auto& [k, v] : meta.items())
        out.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return out;
}

}  // namespace fbgreedy
