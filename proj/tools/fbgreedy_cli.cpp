// fbgreedy: simulate Ising data, learn graph structure, run phase-transition
// sweeps and print theory diagnostics.

#include "fbgreedy/diagnostics.hpp"
#include "fbgreedy/errors.hpp"
#include "fbgreedy/harness.hpp"
#include "fbgreedy/ising.hpp"
#include "fbgreedy/rng.hpp"
#include "fbgreedy/structure.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>
#include <optional>

using namespace fbgreedy;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

std::string require_key(const SampleMatrix& data, const std::string& key) {
  const auto it = data.provenance.find(key);
  if (it == data.provenance.end())
    throw InvalidArgument("sample metadata lacks '" + key + "'; was the file made by simulate?");
  return it->second;
}

// Rebuilds the generating model from the sidecar written by `simulate`.
IsingModel model_from_provenance(const SampleMatrix& data) {
  const Topology topo = parse_topology(require_key(data, "topology"));
  const std::size_t p = std::stoull(require_key(data, "p"));
  const std::size_t hub = std::stoull(require_key(data, "hub_degree"));
  const double omega = std::stod(require_key(data, "omega"));
  const std::uint64_t model_seed = std::stoull(require_key(data, "model_seed"));
  return assign_couplings(make_topology(topo, p, hub), omega, model_seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward-backward greedy structure learning for Ising models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample an Ising model by Gibbs sampling to CSV");
  std::string sim_topology = "chain", sim_out = "samples.csv", sim_truth;
  std::size_t sim_p = 16, sim_n = 500, sim_hub = 0, sim_burn = 200, sim_thin = 10;
  double sim_omega = 0.5;
  std::uint64_t sim_seed = 1;
  sim->add_option("--topology", sim_topology, "chain | grid4 | star")->capture_default_str();
  sim->add_option("--p", sim_p, "Number of nodes")->capture_default_str();
  sim->add_option("--n", sim_n, "Number of samples")->capture_default_str();
  sim->add_option("--hub-degree", sim_hub, "Star hub degree (0: ceil(0.1 p))")->capture_default_str();
  sim->add_option("--omega", sim_omega, "Coupling magnitude")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  sim->add_option("--burn-in", sim_burn, "Burn-in sweeps")->capture_default_str();
  sim->add_option("--thin", sim_thin, "Sweeps between recorded samples")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV (metadata goes to <out>.json)")->capture_default_str();
  sim->add_option("--truth", sim_truth, "Also write the true edge list here");

  // learn
  auto* learn = app.add_subcommand("learn", "Estimate the graph from a sample CSV");
  std::string learn_data, learn_method = "greedy", learn_rule = "OR", learn_out, learn_truth;
  std::string learn_c_prime = "sweep";
  double learn_c = kCalibratedGreedyConstant, learn_nu = 0.5;
  learn->add_option("--data", learn_data, "Sample CSV")->required();
  learn->add_option("--method", learn_method, "greedy | l1")->capture_default_str();
  learn->add_option("--c", learn_c, "Greedy threshold constant")->capture_default_str();
  learn->add_option("--nu", learn_nu, "Backward step factor")->capture_default_str();
  learn->add_option("--c-prime", learn_c_prime, "l1 constant, or 'sweep'")->capture_default_str();
  learn->add_option("--rule", learn_rule, "OR | AND")->capture_default_str();
  learn->add_option("--out", learn_out, "Write the edge list here (default: stdout)");
  learn->add_option("--truth", learn_truth, "Compare against this edge list");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a phase-transition sweep");
  std::string sweep_config;
  std::vector<std::string> sweep_sets;
  sweep->add_option("--config", sweep_config, "key=value config file");
  sweep->add_option("--set", sweep_sets, "Override a setting: key=value (repeatable)");
  std::string sw_topology, sw_betas, sw_methods, sw_c_prime, sw_rule, sw_out;
  std::optional<std::size_t> sw_p, sw_trials, sw_threads;
  std::optional<double> sw_omega, sw_c, sw_nu;
  std::optional<std::uint64_t> sw_seed;
  sweep->add_option("--topology", sw_topology);
  sweep->add_option("--p", sw_p);
  sweep->add_option("--omega", sw_omega);
  sweep->add_option("--betas", sw_betas, "Comma-separated beta grid");
  sweep->add_option("--trials", sw_trials);
  sweep->add_option("--methods", sw_methods, "Comma-separated: greedy,l1");
  sweep->add_option("--c", sw_c);
  sweep->add_option("--nu", sw_nu);
  sweep->add_option("--c-prime", sw_c_prime);
  sweep->add_option("--seed", sw_seed);
  sweep->add_option("--rule", sw_rule);
  sweep->add_option("--threads", sw_threads);
  sweep->add_option("--out-dir", sw_out);
  bool sw_timings = false;
  sweep->add_flag("--record-timings", sw_timings, "Write wall times into results.csv");

  // calibrate
  auto* calib = app.add_subcommand("calibrate", "Pick the greedy constant c under the null model");
  std::string cal_config;
  calib->add_option("--config", cal_config, "key=value config file");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "RSC/RSS constants and theorem checks for a node");
  std::string diag_data;
  std::size_t diag_node = 0;
  double diag_c = kCalibratedGreedyConstant, diag_nu = 0.5;
  std::uint64_t diag_seed = 7;
  diag->add_option("--data", diag_data, "Sample CSV written by simulate")->required();
  diag->add_option("--node", diag_node, "Node index (0-based)")->capture_default_str();
  diag->add_option("--c", diag_c, "Greedy threshold constant")->capture_default_str();
  diag->add_option("--nu", diag_nu, "Backward step factor")->capture_default_str();
  diag->add_option("--probe-seed", diag_seed, "Seed for random probe points")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const EdgeSet skeleton = make_topology(parse_topology(sim_topology), sim_p, sim_hub);
      const std::uint64_t model_seed = CounterRng::stream_key(sim_seed, 0);
      const std::uint64_t sampler_seed = CounterRng::stream_key(sim_seed, 1);
      const IsingModel model = assign_couplings(skeleton, sim_omega, model_seed);
      SampleMatrix data = gibbs_sample(model, sim_n, {sim_burn, sim_thin, sampler_seed});
      data.provenance["topology"] = to_string(parse_topology(sim_topology));
      data.provenance["hub_degree"] = std::to_string(
          parse_topology(sim_topology) == Topology::star ? skeleton.max_degree() : 0);
      data.provenance["omega"] = format_number(sim_omega);
      data.provenance["model_seed"] = std::to_string(model_seed);
      data.provenance["user_seed"] = std::to_string(sim_seed);
      write_samples(sim_out, data);
      if (!sim_truth.empty()) write_edges(sim_truth, model.edge_set());
      std::cout << "wrote " << data.samples() << " x " << data.nodes() << " samples to "
                << sim_out << " (max degree " << skeleton.max_degree() << ")\n";
      return 0;
    }

    if (*learn) {
      const SampleMatrix data = read_samples(learn_data);
      const CombineRule rule =
          (learn_rule == "AND" || learn_rule == "and") ? CombineRule::AND : CombineRule::OR;
      StructureEstimate est;
      if (parse_method(learn_method) == Method::greedy) {
        GreedyConfig gc;
        gc.stop_threshold = greedy_threshold(learn_c, data.samples(), data.nodes());
        gc.backward_factor = learn_nu;
        est = learn_structure(data, gc, rule);
      } else {
        const double cp = learn_c_prime == "sweep"
                              ? select_l1_constant(data, kDefaultL1Candidates).c_prime
                              : std::stod(learn_c_prime);
        est = learn_structure_l1(data, l1_lambda(cp, data.samples(), data.nodes()), rule);
      }
      if (learn_out.empty()) std::cout << format_edges(est.edges);
      else write_edges(learn_out, est.edges);
      if (!learn_truth.empty()) {
        const EdgeComparison cmp = compare_edges(read_edges(learn_truth), est.edges);
        std::cerr << "missed: " << cmp.missed << "\nextra: " << cmp.extra
                  << "\nexact: " << (cmp.exact() ? "true" : "false") << '\n';
      }
      return 0;
    }

    if (*sweep) {
      ExperimentConfig cfg;
      if (!sweep_config.empty()) cfg = load_config(sweep_config, cfg);
      for (const auto& kv : sweep_sets) cfg = parse_config(kv, cfg);
      if (!sw_topology.empty()) cfg.apply("topology", sw_topology);
      if (sw_p) cfg.p = *sw_p;
      if (sw_omega) cfg.omega = *sw_omega;
      if (!sw_betas.empty()) cfg.apply("betas", sw_betas);
      if (sw_trials) cfg.trials = *sw_trials;
      if (!sw_methods.empty()) cfg.apply("methods", sw_methods);
      if (sw_c) cfg.c = *sw_c;
      if (sw_nu) cfg.nu = *sw_nu;
      if (!sw_c_prime.empty()) cfg.apply("c_prime", sw_c_prime);
      if (sw_seed) cfg.seed = *sw_seed;
      if (!sw_rule.empty()) cfg.apply("rule", sw_rule);
      if (sw_threads) cfg.threads = *sw_threads;
      if (!sw_out.empty()) cfg.output_dir = sw_out;
      if (sw_timings) cfg.record_timings = true;

      std::signal(SIGINT, on_interrupt);
      const SweepResult result = run_sweep(cfg, &g_stop);
      write_sweep_outputs(cfg, result);
      std::cout << format_results_csv(result, cfg.record_timings);
      if (result.interrupted) {
        std::cerr << "interrupted: partial results written to " << cfg.output_dir << '\n';
        return 130;
      }
      return 0;
    }

    if (*calib) {
      ExperimentConfig cfg;
      if (!cal_config.empty()) cfg = load_config(cal_config, cfg);
      const Calibration cal = calibrate_threshold_constant(cfg);
      std::cout << "c,false_edges,fits\n";
      for (const auto& row : cal.rows)
        std::cout << format_number(row.c) << ',' << row.false_edges << ',' << row.fits << '\n';
      if (cal.chosen) std::cout << "chosen: " << format_number(*cal.chosen) << '\n';
      else std::cout << "chosen: none\n";
      return cal.chosen ? 0 : 1;
    }

    if (*diag) {
      const SampleMatrix data = read_samples(diag_data);
      const IsingModel model = model_from_provenance(data);
      if (diag_node >= data.nodes()) throw InvalidArgument("node out of range");
      const NodeConditionalLogisticLoss loss(data, diag_node);
      // The conditional loss is minimized at twice the model couplings.
      ParamVector theta_star(loss.dimension());
      for (std::size_t t = 0; t < data.nodes(); ++t)
        if (const auto j = loss.local_index(t)) theta_star.set(*j, 2.0 * model.coupling(diag_node, t));

      GreedyConfig gc;
      gc.stop_threshold = greedy_threshold(diag_c, data.samples(), data.nodes());
      gc.backward_factor = diag_nu;
      const GreedyResult fit = run_greedy(loss, gc);
      const auto probes = default_probe_points(loss.dimension(), theta_star, fit.theta_hat,
                                               std::max<std::size_t>(1, theta_star.support_size()),
                                               diag_seed);
      const TheoryConstants constants = estimate_theory_constants(loss, theta_star, probes);
      const Theorem1Report report = check_theorem1(fit, theta_star, constants, gc.stop_threshold);
      Report out{{"node", std::to_string(diag_node)},
                 {"n", std::to_string(data.samples())},
                 {"p", std::to_string(data.nodes())},
                 {"eps_s", format_number(gc.stop_threshold)}};
      for (auto& kv : describe(constants)) out.push_back(kv);
      for (auto& kv : describe(report)) out.push_back(kv);
      std::cout << format_report(out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
