#include <doctest.h>

#include <fbgreedy/errors.hpp>
#include <fbgreedy/harness.hpp>
#include <fbgreedy/ising.hpp>
#include <fbgreedy/structure.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace fbgreedy;

namespace {

GreedyConfig greedy_config(double c, std::size_t n, std::size_t p) {
  GreedyConfig cfg;
  cfg.stop_threshold = greedy_threshold(c, n, p);
  return cfg;
}

// Audits the greedy contract for every node of a structure run.
void audit_nodes(const SampleMatrix& data, const GreedyConfig& cfg) {
  for (std::size_t r = 0; r < data.nodes(); ++r) {
    const NodeConditionalLogisticLoss loss(data, r);
    const GreedyResult res = run_greedy(loss, cfg);
    const ContractReport rep = audit_greedy(loss, cfg, res);
    INFO("node " << r << ": " << fixture::join(rep.violations));
    CHECK(rep.ok);
  }
}

NeighborhoodEstimate estimate(std::size_t node, std::vector<std::size_t> nbrs) {
  NeighborhoodEstimate e;
  e.node = node;
  e.neighbors = std::move(nbrs);
  return e;
}

}  // namespace

TEST_CASE("combine rules") {
  const std::vector<NeighborhoodEstimate> est{estimate(0, {1}), estimate(1, {})};
  const EdgeSet orr = combine(est, CombineRule::OR, 2);
  CHECK(orr.size() == 1);
  CHECK(orr.contains(0, 1));
  CHECK(combine(est, CombineRule::AND, 2).empty());

  const EdgeSet chain = make_chain(4);
  std::vector<NeighborhoodEstimate> exact;
  for (std::size_t r = 0; r < 4; ++r) exact.push_back(estimate(r, chain.neighbors(r)));
  CHECK(combine(exact, CombineRule::OR, 4) == chain);
  CHECK(combine(exact, CombineRule::AND, 4) == chain);

  CHECK_THROWS_AS(combine(std::span(exact).first(3), CombineRule::OR, 4), MissingNode);
}

TEST_CASE("AND is contained in OR") {
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 3 + trial % 6;
    std::vector<NeighborhoodEstimate> est;
    for (std::size_t r = 0; r < p; ++r) {
      std::vector<std::size_t> nb;
      for (std::size_t t = 0; t < p; ++t)
        if (t != r && rng.uniform() < 0.3) nb.push_back(t);
      est.push_back(estimate(r, nb));
    }
    const EdgeSet orr = combine(est, CombineRule::OR, p);
    const EdgeSet andr = combine(est, CombineRule::AND, p);
    for (const Edge& e : andr) CHECK(orr.contains(e.first, e.second));
  }
}

TEST_CASE("greedy neighborhood is the node-level greedy run") {
  const IsingModel m = assign_couplings(make_chain(6), 0.5, 3);
  const SampleMatrix data = gibbs_sample(m, 1500, {200, 10, 4});
  const GreedyConfig cfg = greedy_config(kCalibratedGreedyConstant, 1500, 6);
  for (std::size_t r = 0; r < 6; ++r) {
    const NeighborhoodEstimate est = greedy_neighborhood(data, r, cfg);
    const NodeConditionalLogisticLoss loss(data, r);
    const GreedyResult res = run_greedy(loss, cfg);
    std::vector<std::size_t> global;
    for (std::size_t j : res.active) global.push_back(loss.global_index(j));
    CHECK(est.node == r);
    CHECK(est.neighbors == global);
    CHECK(est.coefficients == res.theta_hat.values());
    REQUIRE(est.trace.has_value());
    CHECK(est.trace->steps.size() == res.trace.steps.size());
  }
  audit_nodes(data, cfg);
}

TEST_CASE("null model gives empty neighborhoods") {
  const IsingModel m(8);
  std::size_t empty_runs = 0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const SampleMatrix data = gibbs_sample(m, 2000, {200, 10, CounterRng::stream_key(3, trial)});
    const GreedyConfig cfg = greedy_config(1.0, 2000, 8);
    bool all_empty = true;
    for (std::size_t r = 0; r < 8; ++r) all_empty &= greedy_neighborhood(data, r, cfg).neighbors.empty();
    empty_runs += all_empty;
    audit_nodes(data, cfg);
  }
  CHECK(empty_runs >= 9);
}

TEST_CASE("large-sample chain neighborhoods and structure") {
  const IsingModel m = assign_couplings(make_chain(4), 0.5, 11);
  const std::size_t n = 8000;
  const GreedyConfig cfg = greedy_config(kCalibratedGreedyConstant, n, 4);
  std::size_t node_ok = 0, graph_ok = 0, l1_ok = 0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const SampleMatrix data = gibbs_sample(m, n, {200, 10, CounterRng::stream_key(12, trial)});
    node_ok += greedy_neighborhood(data, 1, cfg).neighbors == std::vector<std::size_t>{0, 2};
    graph_ok += learn_structure(data, cfg).edges == m.edge_set();
    const double lambda = std::sqrt(std::log(4.0) / n);
    const NeighborhoodEstimate l1 = l1_logistic_neighborhood(data, 1, lambda);
    l1_ok += l1.neighbors == std::vector<std::size_t>{0, 2};
    REQUIRE(l1.l1_log.has_value());
    const NodeConditionalLogisticLoss loss(data, 1);
    CHECK(l1_subgradient_violation(loss, l1.coefficients, lambda) <= 1e-5);
    if (trial == 0) audit_nodes(data, cfg);
  }
  CHECK(node_ok >= 9);
  CHECK(graph_ok >= 9);
  CHECK(l1_ok >= 9);
}

TEST_CASE("structure learning smoke cases") {
  IsingModel pair(2);
  pair.set_coupling(0, 1, 1.0);
  const SampleMatrix strong = gibbs_sample(pair, 5000, {200, 10, 1});
  const GreedyConfig cfg2 = greedy_config(kCalibratedGreedyConstant, 5000, 2);
  const StructureEstimate est = learn_structure(strong, cfg2);
  CHECK(est.edges.size() == 1);
  CHECK(est.edges.contains(0, 1));
  CHECK(est.neighborhoods.size() == 2);

  const IsingModel null(6);
  const SampleMatrix flat = gibbs_sample(null, 20000, {200, 10, 2});
  CHECK(learn_structure(flat, greedy_config(kCalibratedGreedyConstant, 20000, 6)).edges.empty());
}

TEST_CASE("preconditions and node-attributed failures") {
  const SampleMatrix none(0, 3, {});
  GreedyConfig cfg;
  cfg.stop_threshold = 0.01;
  CHECK_THROWS_AS(greedy_neighborhood(none, 0, cfg), Error);
  CHECK_THROWS_AS(learn_structure(none, cfg), Error);

  // Node 2 copies node 1, so nodes 1 and 2 both see separable data.
  oracle::Spins rows = fixture::random_spins(40, 4, 3);
  for (auto& r : rows) r[2] = r[1];
  const SampleMatrix data = fixture::to_samples(rows);
  try {
    (void)greedy_neighborhood(data, 2, cfg);
    FAIL("expected a node failure");
  } catch (const NodeFailure& e) {
    CHECK(e.node() == 2);
  }
  try {
    (void)learn_structure(data, cfg);
    FAIL("expected a node failure");
  } catch (const NodeFailure& e) {
    CHECK((e.node() == 1 || e.node() == 2));
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("relabeling nodes relabels the estimate") {
  const IsingModel m = assign_couplings(make_grid4(9), 0.6, 21);
  const SampleMatrix data = gibbs_sample(m, 1200, {200, 10, 22});
  const std::vector<std::size_t> order{4, 7, 0, 8, 2, 5, 1, 3, 6};  // new c <- old order[c]
  const GreedyConfig cfg = greedy_config(1.0, 1200, 9);
  const EdgeSet base = learn_structure(data, cfg).edges;
  const EdgeSet perm = learn_structure(data.permute_columns(order), cfg).edges;
  CHECK(base.size() == perm.size());
  for (const Edge& e : perm) CHECK(base.contains(order[e.first], order[e.second]));

  const double lambda = l1_lambda(1.0, 1200, 9);
  const EdgeSet lb = learn_structure_l1(data, lambda).edges;
  const EdgeSet lp = learn_structure_l1(data.permute_columns(order), lambda).edges;
  CHECK(lb.size() == lp.size());
  for (const Edge& e : lp) CHECK(lb.contains(order[e.first], order[e.second]));
}

TEST_CASE("thread count does not change results") {
  const IsingModel m = assign_couplings(make_chain(10), 0.5, 2);
  const SampleMatrix data = gibbs_sample(m, 600, {200, 10, 8});
  const GreedyConfig cfg = greedy_config(1.0, 600, 10);
  const StructureEstimate one = learn_structure(data, cfg, CombineRule::OR, 1);
  const StructureEstimate four = learn_structure(data, cfg, CombineRule::OR, 4);
  CHECK(one.edges == four.edges);
  for (std::size_t r = 0; r < 10; ++r)
    CHECK(one.neighborhoods[r].coefficients == four.neighborhoods[r].coefficients);
}

TEST_CASE("l1: a large penalty gives the zero solution") {
  const SampleMatrix data = fixture::to_samples(fixture::correlated_spins(100, 5, 0.7, 1));
  const NodeConditionalLogisticLoss loss(data, 0);
  const double gmax = loss.gradient(std::vector<double>(4, 0.0)).cwiseAbs().maxCoeff();
  const L1Solution sol = solve_l1_logistic(loss, gmax * 1.0001);
  CHECK(sol.coefficients.cwiseAbs().maxCoeff() == 0.0);
  CHECK(l1_logistic_neighborhood(data, 0, gmax * 1.0001).neighbors.empty());
  CHECK_FALSE(l1_logistic_neighborhood(data, 0, gmax * 0.5).neighbors.empty());
  CHECK_THROWS_AS(solve_l1_logistic(loss, 0.0), InvalidArgument);
}

TEST_CASE("l1: one-dimensional instance matches bisection") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const oracle::Spins rows = fixture::correlated_spins(50, 2, 0.75, 40 + seed);
    const NodeConditionalLogisticLoss loss(fixture::to_samples(rows), 0);
    const double g0 = oracle::node_nll_gradient(rows, 0, {0.0})[0];
    for (double lambda : {0.02, 0.1, 0.3}) {
      const L1Solution sol = solve_l1_logistic(loss, lambda);
      double expect = 0.0;
      if (std::abs(g0) > lambda) {
        // The solution has sign opposite to g(0) and solves g(theta) + lambda sign = 0.
        const double sgn = g0 < 0 ? 1.0 : -1.0;
        expect = oracle::bisect_increasing(
            [&](double t) { return oracle::node_nll_gradient(rows, 0, {t})[0] + sgn * lambda; },
            sgn > 0 ? 0.0 : -20.0, sgn > 0 ? 20.0 : 0.0);
      }
      CHECK(std::abs(sol.coefficients[0] - expect) <= 1e-6);
      CHECK(l1_subgradient_violation(loss, std::vector<double>{sol.coefficients[0]}, lambda) <= 1e-5);
    }
  }
}

TEST_CASE("l1: optimality on random instances and iteration cap") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampleMatrix data =
        fixture::to_samples(fixture::correlated_spins(60 + seed * 10, 7, 0.6, 60 + seed));
    const NodeConditionalLogisticLoss loss(data, seed % 7, seed % 3 == 0);
    const double lambda = l1_lambda(0.5 + 0.25 * (seed % 4), data.samples(), 7);
    L1Options opt;
    opt.include_intercept = loss.has_intercept();
    const L1Solution sol = solve_l1_logistic(loss, lambda, opt);
    const std::vector<double> th(sol.coefficients.data(), sol.coefficients.data() + sol.coefficients.size());
    CHECK(l1_subgradient_violation(loss, th, lambda) <= 1e-5);
    CHECK(sol.log.optimality_gap <= 1e-7);
  }
  const SampleMatrix data = fixture::to_samples(fixture::correlated_spins(100, 6, 0.6, 3));
  const NodeConditionalLogisticLoss loss(data, 0);
  L1Options opt;
  opt.max_iter = 2;
  CHECK_THROWS_AS(solve_l1_logistic(loss, 0.01, opt), MaxIterationsExceeded);
}

TEST_CASE("l1 constant selection") {
  const IsingModel m = assign_couplings(make_chain(6), 0.5, 1);
  const SampleMatrix data = gibbs_sample(m, 400, {200, 10, 2});
  const L1Selection sel = select_l1_constant(data, kDefaultL1Candidates);
  CHECK(sel.heldout_loss.size() == 5);
  const auto best = std::min_element(sel.heldout_loss.begin(), sel.heldout_loss.end());
  CHECK(sel.c_prime == kDefaultL1Candidates[best - sel.heldout_loss.begin()]);
  CHECK(select_l1_constant(data, kDefaultL1Candidates).c_prime == sel.c_prime);
  CHECK(l1_lambda(2.0, 100, 16) == doctest::Approx(2.0 * std::sqrt(std::log(16.0) / 100)));
}

TEST_CASE("edge set text form and comparison") {
  EdgeSet e(5);
  e.insert(3, 1);
  e.insert(0, 4);
  CHECK(e.contains(1, 3));
  CHECK_THROWS_AS(e.insert(2, 2), InvalidArgument);
  CHECK_THROWS_AS(e.insert(2, 5), InvalidArgument);
  CHECK(format_edges(e) == "p 5\n0 4\n1 3\n");
  CHECK(parse_edges(format_edges(e)) == e);

  EdgeSet f(5);
  f.insert(1, 3);
  f.insert(2, 3);
  const EdgeComparison cmp = compare_edges(e, f);
  CHECK(cmp.missed == 1);
  CHECK(cmp.extra == 1);
  CHECK_FALSE(cmp.exact());
  CHECK(compare_edges(e, e).exact());
  CHECK(greedy_threshold(2.0, 100, 16) == doctest::Approx(2.0 * std::log(1600.0) / 100));
}
