// nystrom: command-line front end for Nystrom extensions and their error bounds.
//
//   nystrom approx   --matrix A.txt (--l L [--seed S] | --indices 0,3,5) [--out ext.txt]
//   nystrom trials   (--config cfg.json | --gen SPEC --n N | --matrix A.txt) --k K (--l L | --auto-l) ...
//   nystrom bounds   --k K --tau T --delta D [--epsilon E] --n N --l L [--lambda-next V]
//   nystrom chernoff [--n 128] [--k 2,4] [--coherence low,spiked:1] [--epsilon 0.25,0.5] [--trials 2000]
//
// Exit codes: 0 success, 2 configuration error, 3 input-data error,
// 4 numerical error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nystrom/analysis.hpp"
#include "nystrom/errors.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/matrix_io.hpp"
#include "nystrom/nystrom.hpp"
#include "nystrom/results_io.hpp"
#include "nystrom/sampling.hpp"

namespace {

using nystrom::ExitCode;
using nystrom::Index;
using json = nlohmann::json;

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw nystrom::ConfigError("--indices", "cannot parse '" + item + "' as an index");
    }
  }
  return out;
}

struct ApproxOptions {
  std::string matrix;
  Index l = 0;
  std::string indices;
  std::uint64_t seed = 0;
  std::string out;
};

int run_approx(const ApproxOptions& opt) {
  const nystrom::SymMatrix a = nystrom::load_matrix(opt.matrix);
  std::vector<Index> idx;
  if (!opt.indices.empty()) {
    idx = parse_index_list(opt.indices);
  } else {
    if (opt.l < 1 || opt.l > a.n()) throw nystrom::ConfigError("--l", "need 1 <= l <= n = " + std::to_string(a.n()));
    idx = nystrom::sample_uniform(a.n(), opt.l, nystrom::RngSeed{opt.seed, 0}).indices();
  }
  std::optional<nystrom::ColumnSample> sample;
  try {
    sample.emplace(a.n(), idx);
  } catch (const std::invalid_argument& e) {
    throw nystrom::ConfigError("--indices", e.what());
  }

  const nystrom::NystromResult nr = nystrom::nystrom_extend(a, *sample);
  const double sqrt_error = nystrom::sqrt_projection_error(a, *sample);
  if (!opt.out.empty()) nystrom::save_matrix(opt.out, nr.extension);

  json doc{{"n", a.n()},
           {"l", sample->size()},
           {"indices", sample->indices()},
           {"spectral_error", nr.spectral_error},
           {"sqrt_projection_error", sqrt_error},
           {"rank_w", nr.rank_w},
           {"psd_violation", nr.psd_violation}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

struct TrialsOptions {
  std::string config;
  std::string matrix;
  std::string gen;
  Index n = 0;
  double lambda1 = 1.0;
  std::string coherence = "low";
  Index k = 0;
  Index l = 0;
  bool auto_l = false;
  double epsilon = nystrom::kDefaultEpsilon;
  double delta = 0.05;
  Index trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool timing = false;
  std::string out;
  std::string format = "csv";
  std::string summary;
};

nystrom::OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return nystrom::OutputFormat::csv;
  if (text == "json") return nystrom::OutputFormat::json;
  throw nystrom::ConfigError("format", "expected csv or json");
}

nystrom::ExperimentConfig trials_config(const TrialsOptions& opt, const CLI::App& cmd) {
  if (!opt.config.empty()) {
    nystrom::ExperimentConfig cfg = nystrom::load_config(opt.config);
    if (cmd.count("--out") > 0) cfg.output = opt.out;
    if (cmd.count("--threads") > 0) cfg.threads = opt.threads;
    if (cmd.count("--timing") > 0) cfg.record_timing = true;
    if (cmd.count("--format") > 0) cfg.format = parse_format(opt.format);
    cfg.validate();
    return cfg;
  }

  nystrom::ExperimentConfig cfg;
  if (opt.k < 1) throw nystrom::ConfigError("k", "--k is required and must be >= 1");
  cfg.k = opt.k;
  cfg.epsilon = opt.epsilon;
  cfg.delta = opt.delta;
  cfg.trials = opt.trials;
  cfg.master_seed = opt.seed;
  cfg.threads = opt.threads;
  cfg.record_timing = opt.timing;
  cfg.output = opt.out;
  cfg.format = parse_format(opt.format);
  if (opt.auto_l == (cmd.count("--l") > 0)) throw nystrom::ConfigError("l", "give exactly one of --l and --auto-l");
  if (!opt.auto_l) cfg.l = opt.l;

  if (opt.matrix.empty() == opt.gen.empty()) throw nystrom::ConfigError("matrix", "give exactly one of --matrix and --gen");
  if (!opt.matrix.empty()) {
    cfg.source.path = opt.matrix;
  } else {
    try {
      cfg.source.spectrum = nystrom::SpectrumSpec::parse(opt.gen, opt.n, opt.k, opt.lambda1);
    } catch (const std::invalid_argument& e) {
      throw nystrom::ConfigError("gen", e.what());
    }
    try {
      cfg.source.coherence = nystrom::CoherencePlan::parse(opt.coherence);
    } catch (const std::invalid_argument& e) {
      throw nystrom::ConfigError("coherence", e.what());
    }
  }
  cfg.validate();
  return cfg;
}

int run_trials(const TrialsOptions& opt, const CLI::App& cmd) {
  const nystrom::ExperimentConfig cfg = trials_config(opt, cmd);
  const nystrom::ExperimentResult result = nystrom::run_experiment(cfg);
  nystrom::emit_results(result.records, result.summary, cfg.format, cfg.output);
  if (!opt.summary.empty()) {
    std::ofstream out(opt.summary);
    if (!out) throw std::runtime_error("cannot open '" + opt.summary + "'");
    nystrom::write_summary_json(out, result.summary);
  } else if (!cfg.output.empty()) {
    nystrom::write_summary_json(std::cout, result.summary);
  }
  std::cerr << result.records.size() << " trials\n";
  return 0;
}

struct BoundsOptions {
  Index k = 0;
  double tau = 1.0;
  double delta = 0.05;
  double epsilon = nystrom::kDefaultEpsilon;
  Index n = 0;
  Index l = 0;
  double lambda_next = 1.0;
};

int run_bounds(const BoundsOptions& opt) {
  nystrom::BoundReport r;
  Index l = opt.l;
  try {
    if (l == 0) l = nystrom::required_samples(opt.k, opt.tau, opt.delta, opt.epsilon);
    r = nystrom::bound_report(opt.n, opt.k, opt.tau, opt.delta, opt.epsilon, l, opt.lambda_next);
  } catch (const std::invalid_argument& e) {
    throw nystrom::ConfigError("bounds", e.what());
  }
  json doc{{"k", r.k},
           {"tau", r.tau},
           {"delta", r.delta},
           {"epsilon", r.epsilon},
           {"n", opt.n},
           {"l", l},
           {"lambda_next", opt.lambda_next},
           {"l_required", r.l_required},
           {"prob_bound", r.prob_bound},
           {"chernoff_tail", r.chernoff_tail}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

struct ChernoffOptions {
  Index n = 128;
  std::string ks = "2,4";
  std::string plans = "low,spiked:1";
  std::string epsilons = "0.25,0.5";
  Index trials = 2000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_chernoff(const ChernoffOptions& opt) {
  nystrom::ChernoffSweepConfig cfg;
  cfg.n = opt.n;
  cfg.trials = opt.trials;
  cfg.master_seed = opt.seed;
  cfg.ks = parse_index_list(opt.ks);
  cfg.plans.clear();
  cfg.epsilons.clear();
  std::stringstream plans(opt.plans);
  std::string item;
  try {
    while (std::getline(plans, item, ',')) cfg.plans.push_back(nystrom::CoherencePlan::parse(item));
    std::stringstream eps(opt.epsilons);
    while (std::getline(eps, item, ',')) cfg.epsilons.push_back(std::stod(item));
  } catch (const std::exception& e) {
    throw nystrom::ConfigError("chernoff", e.what());
  }
  std::vector<nystrom::ChernoffPoint> points;
  try {
    points = nystrom::chernoff_sweep(cfg);
  } catch (const std::invalid_argument& e) {
    throw nystrom::ConfigError("chernoff", e.what());
  }
  if (opt.out.empty()) {
    nystrom::write_chernoff_csv(std::cout, points);
  } else {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + opt.out + "'");
    nystrom::write_chernoff_csv(out, points);
  }
  bool all_pass = true;
  for (const auto& p : points) all_pass = all_pass && p.pass;
  std::cerr << points.size() << " grid points, " << (all_pass ? "all within" : "SOME ABOVE") << " the Chernoff tail\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom extensions of PSD matrices and their spectral-norm error bounds"};
  app.require_subcommand(1);

  ApproxOptions approx;
  auto* approx_cmd = app.add_subcommand("approx", "Nystrom extension of a matrix file from one column sample");
  approx_cmd->add_option("--matrix", approx.matrix, "Matrix file")->required();
  approx_cmd->add_option("--l", approx.l, "Number of uniformly sampled columns");
  approx_cmd->add_option("--indices", approx.indices, "Comma-separated column indices (overrides --l)");
  approx_cmd->add_option("--seed", approx.seed, "Sampling seed");
  approx_cmd->add_option("--out", approx.out, "Write the extension to this file");

  TrialsOptions trials;
  auto* trials_cmd = app.add_subcommand("trials", "Monte-Carlo Nystrom trials with bound checks");
  trials_cmd->add_option("--config", trials.config, "JSON experiment config (--out, --format, --threads, --timing still apply)");
  trials_cmd->add_option("--matrix", trials.matrix, "Matrix file");
  trials_cmd->add_option("--gen", trials.gen, "Generated spectrum: exact | exp:<r> | power:<a> | custom:<list>");
  trials_cmd->add_option("--n", trials.n, "Generated matrix dimension");
  trials_cmd->add_option("--lambda1", trials.lambda1, "Largest generated eigenvalue");
  trials_cmd->add_option("--coherence", trials.coherence, "Coherence plan: low | flat | spiked:<m>");
  trials_cmd->add_option("--k", trials.k, "Target rank");
  trials_cmd->add_option("--l", trials.l, "Columns per trial");
  trials_cmd->add_flag("--auto-l", trials.auto_l, "Use the sample-size rule for l");
  trials_cmd->add_option("--epsilon", trials.epsilon, "Tuning parameter in (0,1)");
  trials_cmd->add_option("--delta", trials.delta, "Failure probability in (0,1)");
  trials_cmd->add_option("--trials", trials.trials, "Number of trials");
  trials_cmd->add_option("--seed", trials.seed, "Master seed");
  trials_cmd->add_option("--threads", trials.threads, "Worker threads");
  trials_cmd->add_flag("--timing", trials.timing, "Record wall time per trial (output no longer byte-stable)");
  trials_cmd->add_option("--out", trials.out, "Output file (default stdout)");
  trials_cmd->add_option("--format", trials.format, "csv | json");
  trials_cmd->add_option("--summary", trials.summary, "Write the JSON summary to this file");

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the sample-size rule and error bounds");
  bounds_cmd->add_option("--k", bounds.k, "Target rank")->required();
  bounds_cmd->add_option("--tau", bounds.tau, "Coherence of the dominant subspace")->required();
  bounds_cmd->add_option("--delta", bounds.delta, "Failure probability")->required();
  bounds_cmd->add_option("--epsilon", bounds.epsilon, "Tuning parameter");
  bounds_cmd->add_option("--n", bounds.n, "Matrix dimension")->required();
  bounds_cmd->add_option("--l", bounds.l, "Number of sampled columns (default: the required number)");
  bounds_cmd->add_option("--lambda-next", bounds.lambda_next, "lambda_{k+1}(A)");

  ChernoffOptions chernoff;
  auto* chernoff_cmd = app.add_subcommand("chernoff", "Empirical check of the matrix Chernoff tail");
  chernoff_cmd->add_option("--n", chernoff.n, "Dimension");
  chernoff_cmd->add_option("--k", chernoff.ks, "Comma-separated ranks");
  chernoff_cmd->add_option("--coherence", chernoff.plans, "Comma-separated coherence plans");
  chernoff_cmd->add_option("--epsilon", chernoff.epsilons, "Comma-separated epsilons");
  chernoff_cmd->add_option("--trials", chernoff.trials, "Trials per grid point");
  chernoff_cmd->add_option("--seed", chernoff.seed, "Master seed");
  chernoff_cmd->add_option("--out", chernoff.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    if (*approx_cmd) return run_approx(approx);
    if (*trials_cmd) return run_trials(trials, *trials_cmd);
    if (*bounds_cmd) return run_bounds(bounds);
    if (*chernoff_cmd) return run_chernoff(chernoff);
  } catch (const nystrom::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
