#pragma once

#include "fbgreedy/ising.hpp"
#include "fbgreedy/structure.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbgreedy {

// Greedy threshold constant c in eps_S = c log(n p) / n, chosen by
// `fbgreedy calibrate` (smallest c in {0.25, 0.5, 1, 2} with no false edges
// under the null model on the p = 16 chain grid). Not a published value.
inline constexpr double kCalibratedGreedyConstant = 2.0;

enum class Method { greedy, l1 };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct ExperimentConfig {
  Topology topology = Topology::chain;
  std::size_t p = 16;
  std::size_t hub_degree = 0;  // star only; 0 means ceil(0.1 p)
  double omega = 0.5;
  std::vector<double> betas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  std::size_t trials = 10;
  std::vector<Method> methods{Method::greedy, Method::l1};
  double c = kCalibratedGreedyConstant;
  double nu = 0.5;
  std::optional<double> c_prime;  // empty: choose per trial by held-out likelihood
  std::uint64_t seed = 1;
  CombineRule rule = CombineRule::OR;
  std::string output_dir = ".";
  std::size_t burn_in_sweeps = 200;
  std::size_t thin_sweeps = 10;
  std::size_t threads = 0;
  bool record_timings = false;  // timings in the results CSV break byte-reproducibility

  void validate() const;

  // Flat "key = value" settings; unknown keys throw InvalidArgument.
  void apply(const std::string& key, const std::string& value);
  std::vector<std::pair<std::string, std::string>> settings() const;

  EdgeSet skeleton() const;
  std::size_t max_degree() const;
};

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// n(beta) = ceil(beta * 20 d log p).
std::size_t sample_size(double beta, std::size_t d, std::size_t p);

struct TrialData {
  IsingModel model;
  SampleMatrix samples;
  std::uint64_t model_seed = 0;
  std::uint64_t sampler_seed = 0;
};

// Model and samples for (beta, trial); independent of the method so every
// method in a trial sees the same data.
TrialData make_trial_data(const ExperimentConfig& config, double beta, std::size_t trial);

struct TrialRecord {
  Method method = Method::greedy;
  double beta = 0.0;
  std::size_t trial = 0;
  std::size_t n = 0;
  std::uint64_t model_seed = 0;
  std::uint64_t sampler_seed = 0;
  bool exact = false;
  std::size_t missed = 0;
  std::size_t extra = 0;
  bool failed = false;
  std::string failure;
  double tuning = 0.0;  // eps_S for greedy, lambda for l1
  double c_prime = 0.0;
  double seconds = 0.0;
};

TrialRecord run_method(const ExperimentConfig& config, const TrialData& data, double beta,
                       std::size_t trial, Method method);
TrialRecord run_trial(const ExperimentConfig& config, double beta, std::size_t trial,
                      Method method);

struct SweepPoint {
  Method method = Method::greedy;
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_seconds = 0.0;
};

struct SweepResult {
  std::size_t p = 0;
  std::size_t d = 0;
  std::vector<SweepPoint> points;  // method-major, beta ascending
  std::vector<TrialRecord> trials;
  bool interrupted = false;

  const SweepPoint* find(Method m, double beta) const;
};

// Runs every (beta, trial) unit, all methods per unit on shared data.
// Setting *stop makes the sweep finish the units in flight and return the
// completed ones with interrupted = true.
SweepResult run_sweep(const ExperimentConfig& config, const std::atomic<bool>* stop = nullptr);

// %.6g (correctly rounded, ties to even on the binary value).
std::string format_number(double v);

inline constexpr const char* kResultsHeader =
    "method,beta,n,p,d,trials,successes,success_rate,mean_seconds";

std::string format_results_csv(const SweepResult& sweep, bool record_timings);
std::string format_trials_csv(const SweepResult& sweep);
std::string format_metadata(const ExperimentConfig& config, const SweepResult& sweep);

// Writes results.csv, trials.csv, plot.svg and metadata.json into the output
// directory (created if missing).
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& sweep);

std::string render_plot(const SweepResult& sweep);
void emit_plot(const SweepResult& sweep, const std::string& path);

struct CalibrationRow {
  double c = 0.0;
  std::size_t false_edges = 0;
  std::size_t fits = 0;
};

struct Calibration {
  std::optional<double> chosen;
  std::vector<CalibrationRow> rows;
};

// Zero-coupling model on `config`'s topology: for each candidate (ascending)
// count false edges over the beta grid and trials; choose the smallest c with
// none.
Calibration calibrate_threshold_constant(const ExperimentConfig& config,
                                         std::vector<double> candidates = {0.25, 0.5, 1.0, 2.0});

std::string version_string();

}  // namespace fbgreedy
