#include "fbgreedy/harness.hpp"

#include "fbgreedy/errors.hpp"
#include "fbgreedy/parallel.hpp"
#include "fbgreedy/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef FBGREEDY_VERSION
#define FBGREEDY_VERSION "unknown"
#endif

namespace fbgreedy {

std::string version_string() { return FBGREEDY_VERSION; }

std::string to_string(Method m) { return m == Method::greedy ? "greedy" : "l1"; }

Method parse_method(const std::string& s) {
  if (s == "greedy") return Method::greedy;
  if (s == "l1") return Method::l1;
  throw InvalidArgument("unknown method '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("setting '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw InvalidArgument("setting '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument("setting '" + key + "' expects a boolean, got '" + v + "'");
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "topology") topology = parse_topology(v);
  else if (key == "p") p = to_unsigned(key, v);
  else if (key == "hub_degree") hub_degree = to_unsigned(key, v);
  else if (key == "omega") omega = to_double(key, v);
  else if (key == "betas") {
    betas.clear();
    for (const auto& b : split_list(v)) betas.push_back(to_double(key, b));
  } else if (key == "trials") trials = to_unsigned(key, v);
  else if (key == "methods") {
    methods.clear();
    for (const auto& m : split_list(v)) methods.push_back(parse_method(m));
  } else if (key == "c") c = to_double(key, v);
  else if (key == "nu") nu = to_double(key, v);
  else if (key == "c_prime") {
    if (v == "sweep") c_prime.reset();
    else c_prime = to_double(key, v);
  } else if (key == "seed") seed = to_unsigned(key, v);
  else if (key == "rule") {
    if (v == "OR" || v == "or") rule = CombineRule::OR;
    else if (v == "AND" || v == "and") rule = CombineRule::AND;
    else throw InvalidArgument("rule must be OR or AND");
  } else if (key == "output_dir") output_dir = v;
  else if (key == "burn_in_sweeps") burn_in_sweeps = to_unsigned(key, v);
  else if (key == "thin_sweeps") thin_sweeps = to_unsigned(key, v);
  else if (key == "threads") threads = to_unsigned(key, v);
  else if (key == "record_timings") record_timings = to_bool(key, v);
  else throw InvalidArgument("unknown setting '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::settings() const {
  std::string m;
  for (std::size_t i = 0; i < methods.size(); ++i) m += (i ? "," : "") + to_string(methods[i]);
  return {{"topology", to_string(topology)},
          {"p", std::to_string(p)},
          {"hub_degree", std::to_string(hub_degree)},
          {"omega", format_number(omega)},
          {"betas", join_numbers(betas)},
          {"trials", std::to_string(trials)},
          {"methods", m},
          {"c", format_number(c)},
          {"nu", format_number(nu)},
          {"c_prime", c_prime ? format_number(*c_prime) : "sweep"},
          {"seed", std::to_string(seed)},
          {"rule", rule == CombineRule::OR ? "OR" : "AND"},
          {"output_dir", output_dir},
          {"burn_in_sweeps", std::to_string(burn_in_sweeps)},
          {"thin_sweeps", std::to_string(thin_sweeps)},
          {"threads", std::to_string(threads)},
          {"record_timings", record_timings ? "true" : "false"}};
}

EdgeSet ExperimentConfig::skeleton() const { return make_topology(topology, p, hub_degree); }

std::size_t ExperimentConfig::max_degree() const { return skeleton().max_degree(); }

void ExperimentConfig::validate() const {
  if (betas.empty()) throw InvalidArgument("beta grid is empty");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0)) throw InvalidArgument("beta values must be positive");
    if (i && !(betas[i] > betas[i - 1])) throw InvalidArgument("beta grid must be increasing");
  }
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (methods.empty()) throw InvalidArgument("no methods selected");
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidArgument("nu must lie in (0, 1)");
  if (c_prime && !(*c_prime > 0.0)) throw InvalidArgument("c_prime must be positive");
  if (thin_sweeps < 1) throw InvalidArgument("thin_sweeps must be at least 1");
  const std::size_t d = max_degree();
  for (double b : betas)
    if (sample_size(b, d, p) < 2)
      throw InvalidArgument("beta " + format_number(b) + " gives fewer than 2 samples");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    base.apply(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open config " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::size_t sample_size(double beta, std::size_t d, std::size_t p) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
  const double n = beta * 20.0 * static_cast<double>(d) * std::log(static_cast<double>(p));
  return static_cast<std::size_t>(std::ceil(n - 1e-9));
}

TrialData make_trial_data(const ExperimentConfig& config, double beta, std::size_t trial) {
  const EdgeSet skeleton = config.skeleton();
  const std::size_t n = sample_size(beta, skeleton.max_degree(), config.p);
  if (n < 2) throw InvalidArgument("beta " + format_number(beta) + " gives fewer than 2 samples");

  // Stream rule: trial t at sample size n uses key stream_key(stream_key(seed, t), n);
  // sub-stream 0 draws coupling signs, sub-stream 1 drives the sampler.
  const std::uint64_t key = CounterRng::stream_key(CounterRng::stream_key(config.seed, trial), n);
  TrialData data{IsingModel(config.p), {}, CounterRng::stream_key(key, 0),
                 CounterRng::stream_key(key, 1)};
  data.model = assign_couplings(skeleton, config.omega, data.model_seed);
  data.samples = gibbs_sample(data.model, n,
                              {config.burn_in_sweeps, config.thin_sweeps, data.sampler_seed});
  return data;
}

TrialRecord run_method(const ExperimentConfig& config, const TrialData& data, double beta,
                       std::size_t trial, Method method) {
  TrialRecord rec;
  rec.method = method;
  rec.beta = beta;
  rec.trial = trial;
  rec.n = data.samples.samples();
  rec.model_seed = data.model_seed;
  rec.sampler_seed = data.sampler_seed;
  const EdgeSet truth = data.model.edge_set();
  const std::size_t p = data.samples.nodes();

  const auto start = std::chrono::steady_clock::now();
  try {
    StructureEstimate est;
    if (method == Method::greedy) {
      GreedyConfig gc;
      gc.stop_threshold = greedy_threshold(config.c, rec.n, p);
      gc.backward_factor = config.nu;
      rec.tuning = gc.stop_threshold;
      est = learn_structure(data.samples, gc, config.rule, 1);
    } else {
      rec.c_prime = config.c_prime
                        ? *config.c_prime
                        : select_l1_constant(data.samples, kDefaultL1Candidates).c_prime;
      rec.tuning = l1_lambda(rec.c_prime, rec.n, p);
      est = learn_structure_l1(data.samples, rec.tuning, config.rule, {}, 1);
    }
    const EdgeComparison cmp = compare_edges(truth, est.edges);
    rec.missed = cmp.missed;
    rec.extra = cmp.extra;
    rec.exact = cmp.exact();
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.exact = false;
  }
  rec.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, double beta, std::size_t trial,
                      Method method) {
  return run_method(config, make_trial_data(config, beta, trial), beta, trial, method);
}

const SweepPoint* SweepResult::find(Method m, double beta) const {
  for (const auto& pt : points)
    if (pt.method == m && pt.beta == beta) return &pt;
  return nullptr;
}

SweepResult run_sweep(const ExperimentConfig& config, const std::atomic<bool>* stop) {
  config.validate();
  const std::size_t units = config.betas.size() * config.trials;
  const std::size_t per_unit = config.methods.size();
  std::vector<std::optional<std::vector<TrialRecord>>> done(units);

  parallel_for(units, config.threads, [&](std::size_t u) {
    if (stop && stop->load()) return;
    const double beta = config.betas[u / config.trials];
    const std::size_t trial = u % config.trials;
    const TrialData data = make_trial_data(config, beta, trial);
    std::vector<TrialRecord> recs;
    recs.reserve(per_unit);
    for (Method m : config.methods) recs.push_back(run_method(config, data, beta, trial, m));
    done[u] = std::move(recs);
  });

  SweepResult out;
  out.p = config.p;
  out.d = config.max_degree();
  for (Method m : config.methods)
    for (std::size_t b = 0; b < config.betas.size(); ++b) {
      SweepPoint pt;
      pt.method = m;
      pt.beta = config.betas[b];
      pt.n = sample_size(pt.beta, out.d, config.p);
      double seconds = 0.0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const auto& unit = done[b * config.trials + t];
        if (!unit) continue;
        for (const auto& rec : *unit)
          if (rec.method == m) {
            ++pt.trials;
            pt.successes += rec.exact;
            seconds += rec.seconds;
          }
      }
      if (pt.trials == 0) continue;
      pt.success_rate = static_cast<double>(pt.successes) / static_cast<double>(pt.trials);
      pt.mean_seconds = seconds / static_cast<double>(pt.trials);
      out.points.push_back(pt);
    }
  for (auto& unit : done) {
    if (!unit) {
      out.interrupted = true;
      continue;
    }
    for (auto& rec : *unit) out.trials.push_back(std::move(rec));
  }
  return out;
}

std::string format_results_csv(const SweepResult& sweep, bool record_timings) {
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const auto& pt : sweep.points)
    os << to_string(pt.method) << ',' << format_number(pt.beta) << ',' << pt.n << ',' << sweep.p
       << ',' << sweep.d << ',' << pt.trials << ',' << pt.successes << ','
       << format_number(pt.success_rate) << ','
       << (record_timings ? format_number(pt.mean_seconds) : std::string("0")) << '\n';
  return os.str();
}

std::string format_trials_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "method,beta,trial,n,model_seed,sampler_seed,exact,missed,extra,failed,tuning,c_prime\n";
  for (const auto& r : sweep.trials)
    os << to_string(r.method) << ',' << format_number(r.beta) << ',' << r.trial << ',' << r.n
       << ',' << r.model_seed << ',' << r.sampler_seed << ',' << (r.exact ? 1 : 0) << ','
       << r.missed << ',' << r.extra << ',' << (r.failed ? 1 : 0) << ','
       << format_number(r.tuning) << ',' << format_number(r.c_prime) << '\n';
  return os.str();
}

std::string format_metadata(const ExperimentConfig& config, const SweepResult& sweep) {
  nlohmann::ordered_json meta;
  meta["version"] = version_string();
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config.settings()) cfg[k] = v;
  meta["config"] = cfg;
  meta["p"] = sweep.p;
  meta["d"] = sweep.d;
  meta["interrupted"] = sweep.interrupted;
  nlohmann::ordered_json trials = nlohmann::ordered_json::array();
  for (const auto& r : sweep.trials) {
    nlohmann::ordered_json t;
    t["method"] = to_string(r.method);
    t["beta"] = r.beta;
    t["trial"] = r.trial;
    t["n"] = r.n;
    t["model_seed"] = r.model_seed;
    t["sampler_seed"] = r.sampler_seed;
    t["exact"] = r.exact;
    t["seconds"] = r.seconds;
    if (r.failed) t["failure"] = r.failure;
    if (r.method == Method::l1) t["c_prime"] = r.c_prime;
    trials.push_back(std::move(t));
  }
  meta["trials"] = std::move(trials);
  return meta.dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoFailure("failed writing " + path.string());
}

}  // namespace

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& sweep) {
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "results.csv", format_results_csv(sweep, config.record_timings));
  write_text(dir / "trials.csv", format_trials_csv(sweep));
  write_text(dir / "metadata.json", format_metadata(config, sweep));
  if (!sweep.points.empty()) emit_plot(sweep, (dir / "plot.svg").string());
}

void emit_plot(const SweepResult& sweep, const std::string& path) {
  write_text(path, render_plot(sweep));
}

Calibration calibrate_threshold_constant(const ExperimentConfig& config,
                                         std::vector<double> candidates) {
  config.validate();
  std::sort(candidates.begin(), candidates.end());
  const std::size_t d = config.max_degree();
  const std::size_t units = config.betas.size() * config.trials;

  // Null data: same sample sizes as the sweep, no couplings.
  std::vector<SampleMatrix> data(units);
  parallel_for(units, config.threads, [&](std::size_t u) {
    const double beta = config.betas[u / config.trials];
    const std::size_t n = sample_size(beta, d, config.p);
    const std::uint64_t key = CounterRng::stream_key(
        CounterRng::stream_key(config.seed ^ 0x6e756c6cULL, u % config.trials), n);
    data[u] = gibbs_sample(IsingModel(config.p), n,
                           {config.burn_in_sweeps, config.thin_sweeps, key});
  });

  Calibration cal;
  for (double c : candidates) {
    std::vector<std::size_t> false_edges(units, 0);
    parallel_for(units, config.threads, [&](std::size_t u) {
      GreedyConfig gc;
      gc.stop_threshold = greedy_threshold(c, data[u].samples(), config.p);
      gc.backward_factor = config.nu;
      try {
        false_edges[u] = learn_structure(data[u], gc, config.rule, 1).edges.size();
      } catch (const Error&) {
        false_edges[u] = config.p;  // a failed fit counts against the constant
      }
    });
    CalibrationRow row{c, 0, units};
    for (auto f : false_edges) row.false_edges += f;
    cal.rows.push_back(row);
    if (row.false_edges == 0 && !cal.chosen) cal.chosen = c;
  }
  return cal;
}

}  // namespace fbgreedy
