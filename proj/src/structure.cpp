#include "fbgreedy/structure.hpp"

#include "fbgreedy/errors.hpp"
#include "fbgreedy/parallel.hpp"

#include <cmath>
#include <sstream>

namespace fbgreedy {

double greedy_threshold(double c, std::size_t n, std::size_t p) {
  if (n == 0 || p == 0) throw InvalidArgument("threshold needs n, p >= 1");
  const double nd = static_cast<double>(n);
  return c * std::log(nd * static_cast<double>(p)) / nd;
}

NeighborhoodEstimate greedy_neighborhood(const SampleMatrix& data, std::size_t node,
                                         const GreedyConfig& config) {
  if (data.samples() == 0) throw InvalidArgument("neighborhood estimation needs n >= 1");
  if (node >= data.nodes()) throw InvalidArgument("node index out of range");
  try {
    const NodeConditionalLogisticLoss loss(data, node);
    GreedyResult fit = run_greedy(loss, config);
    NeighborhoodEstimate est;
    est.node = node;
    for (std::size_t j : fit.active) est.neighbors.push_back(loss.global_index(j));
    est.coefficients = fit.theta_hat.values();
    est.trace = std::move(fit.trace);
    return est;
  } catch (const NodeFailure&) {
    throw;
  } catch (const Error& e) {
    throw NodeFailure(node, e.what());
  }
}

EdgeSet combine(std::span<const NeighborhoodEstimate> estimates, CombineRule rule, std::size_t p) {
  std::vector<const NeighborhoodEstimate*> by_node(p, nullptr);
  for (const auto& e : estimates) {
    if (e.node >= p) throw InvalidArgument("estimate for node outside the graph");
    by_node[e.node] = &e;
  }
  for (std::size_t r = 0; r < p; ++r)
    if (!by_node[r]) throw MissingNode("no neighborhood estimate for node " + std::to_string(r));

  auto lists = [&](std::size_t r, std::size_t t) {
    const auto& nb = by_node[r]->neighbors;
    return std::find(nb.begin(), nb.end(), t) != nb.end();
  };
  EdgeSet out(p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t t : by_node[r]->neighbors) {
      if (t == r || t >= p) throw InvalidArgument("neighborhood lists an invalid node");
      if (rule == CombineRule::OR || lists(t, r)) out.insert(r, t);
    }
  return out;
}

namespace {

template <class Fit>
StructureEstimate fit_all_nodes(const SampleMatrix& data, CombineRule rule, std::size_t threads,
                                Fit&& fit) {
  const std::size_t p = data.nodes();
  std::vector<NeighborhoodEstimate> estimates(p);
  std::vector<std::string> failures(p);
  parallel_for(p, threads, [&](std::size_t r) {
    try {
      estimates[r] = fit(r);
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  });
  std::optional<std::size_t> first;
  std::ostringstream msg;
  for (std::size_t r = 0; r < p; ++r) {
    if (failures[r].empty()) continue;
    if (!first) first = r;
    else msg << "; ";
    msg << failures[r];
  }
  if (first) throw NodeFailure(*first, msg.str());
  StructureEstimate out;
  out.edges = combine(estimates, rule, p);
  out.neighborhoods = std::move(estimates);
  return out;
}

}  // namespace

StructureEstimate learn_structure(const SampleMatrix& data, const GreedyConfig& config,
                                  CombineRule rule, std::size_t threads) {
  if (data.samples() == 0) throw InvalidArgument("structure learning needs n >= 1");
  return fit_all_nodes(data, rule, threads,
                       [&](std::size_t r) { return greedy_neighborhood(data, r, config); });
}

StructureEstimate learn_structure_l1(const SampleMatrix& data, double lambda, CombineRule rule,
                                     const L1Options& options, std::size_t threads) {
  if (data.samples() == 0) throw InvalidArgument("structure learning needs n >= 1");
  return fit_all_nodes(data, rule, threads, [&](std::size_t r) {
    return l1_logistic_neighborhood(data, r, lambda, options);
  });
}

}  // namespace fbgreedy
