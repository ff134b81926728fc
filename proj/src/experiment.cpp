#include "nystrom/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nystrom/errors.hpp"
#include "nystrom/matrix_io.hpp"
#include "nystrom/nystrom.hpp"
#include "nystrom/sampling.hpp"

namespace nystrom {

namespace {

using json = nlohmann::json;

// Runs body(i) for i in [0, count) on `threads` workers; rethrows the first
// exception after all workers stop.
template <typename Body>
void parallel_for(Index count, unsigned threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (Index i = next++; i < count && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto workers = std::min<Index>(threads, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Problem {
  SymMatrix a;
  SpectralPartition partition;
  double tau;
};

Problem prepare_problem(const ExperimentConfig& cfg) {
  if (cfg.source.path) {
    SymMatrix a = load_matrix(*cfg.source.path);
    if (cfg.k > a.n()) throw ConfigError("k", "k = " + std::to_string(cfg.k) + " exceeds matrix dimension " + std::to_string(a.n()));
    SpectralPartition p = partition(psd_eig(a), cfg.k);
    const double tau = coherence(p.u1);
    return {std::move(a), std::move(p), tau};
  }
  SpectrumSpec spec = cfg.source.spectrum;
  spec.k = cfg.k;
  PlantedInstance inst = planted_instance(spec, cfg.source.coherence, RngSeed{cfg.master_seed, kInstanceStream});
  return {std::move(inst.a), std::move(inst.partition), inst.tau};
}

template <typename T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 1) throw ConfigError("k", "must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (l && *l < 1) throw ConfigError("l", "must be >= 1 or \"auto\"");
  if (!source.path) {
    if (source.spectrum.n < 1) throw ConfigError("n", "generator dimension must be >= 1");
    if (k > source.spectrum.n) throw ConfigError("k", "exceeds generator dimension n");
    if (l && *l > source.spectrum.n) throw ConfigError("l", "exceeds generator dimension n");
    if (source.coherence.kind == CoherencePlan::Kind::spiked && source.coherence.spikes > k) {
      throw ConfigError("coherence", "spike count exceeds k");
    }
    SpectrumSpec spec = source.spectrum;
    spec.k = k;
    try {
      spectrum_values(spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("spectrum", e.what());
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");

  ExperimentConfig cfg;
  cfg.k = get_field<Index>(doc, "k");
  if (doc.contains("epsilon")) cfg.epsilon = get_field<double>(doc, "epsilon");
  if (doc.contains("delta")) cfg.delta = get_field<double>(doc, "delta");
  if (doc.contains("trials")) cfg.trials = get_field<Index>(doc, "trials");
  if (doc.contains("seed")) cfg.master_seed = get_field<std::uint64_t>(doc, "seed");
  if (doc.contains("threads")) cfg.threads = get_field<unsigned>(doc, "threads");
  if (doc.contains("timing")) cfg.record_timing = get_field<bool>(doc, "timing");
  if (doc.contains("out")) cfg.output = get_field<std::string>(doc, "out");
  if (doc.contains("format")) {
    const auto fmt = get_field<std::string>(doc, "format");
    if (fmt == "csv") {
      cfg.format = OutputFormat::csv;
    } else if (fmt == "json") {
      cfg.format = OutputFormat::json;
    } else {
      throw ConfigError("format", "expected \"csv\" or \"json\", got \"" + fmt + "\"");
    }
  }
  if (doc.contains("l")) {
    const json& l = doc.at("l");
    if (l.is_string() && l.get<std::string>() == "auto") {
      cfg.l.reset();
    } else if (l.is_number_integer()) {
      cfg.l = l.get<Index>();
    } else {
      throw ConfigError("l", "expected a positive integer or \"auto\"");
    }
  }

  const bool has_matrix = doc.contains("matrix");
  const bool has_generator = doc.contains("generator");
  if (has_matrix == has_generator) throw ConfigError("matrix", "exactly one of \"matrix\" and \"generator\" is required");
  if (has_matrix) {
    cfg.source.path = get_field<std::string>(doc, "matrix");
  } else {
    const json& gen = doc.at("generator");
    if (!gen.is_object()) throw ConfigError("generator", "expected an object");
    const auto n = get_field<Index>(gen, "n");
    const double lambda1 = gen.contains("lambda1") ? get_field<double>(gen, "lambda1") : 1.0;
    try {
      cfg.source.spectrum = SpectrumSpec::parse(get_field<std::string>(gen, "spectrum"), n, cfg.k, lambda1);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("spectrum", e.what());
    }
    try {
      cfg.source.coherence = CoherencePlan::parse(gen.contains("coherence") ? get_field<std::string>(gen, "coherence") : "low");
    } catch (const std::invalid_argument& e) {
      throw ConfigError("coherence", e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ExperimentSummary summarize(const std::vector<TrialRecord>& records, const ExperimentSummary& facts) {
  ExperimentSummary s = facts;
  s.trials = static_cast<Index>(records.size());
  s.failures = 0;
  s.rank_deficient = 0;
  s.failures_rank_deficient = 0;
  s.worst_psd_violation = 0.0;
  std::vector<double> errors;
  errors.reserve(records.size());
  for (const auto& r : records) {
    const bool failed = !r.error_le_bound;
    s.failures += failed;
    s.rank_deficient += !r.omega1_full_rank;
    s.failures_rank_deficient += failed && !r.omega1_full_rank;
    s.worst_psd_violation = std::min(s.worst_psd_violation, s.lambda1 > 0 ? r.psd_violation / s.lambda1 : r.psd_violation);
    errors.push_back(r.spectral_error);
  }
  const double t = records.empty() ? 1.0 : static_cast<double>(records.size());
  s.failure_rate = static_cast<double>(s.failures) / t;
  s.rank_deficiency_rate = static_cast<double>(s.rank_deficient) / t;
  std::sort(errors.begin(), errors.end());
  s.error = {quantile(errors, 0.0),  quantile(errors, 0.25), quantile(errors, 0.5),
             quantile(errors, 0.75), quantile(errors, 0.95), quantile(errors, 1.0)};
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = prepare_problem(cfg);
  const Index n = problem.a.n();

  ExperimentSummary facts;
  facts.n = n;
  facts.k = cfg.k;
  facts.tau = problem.tau;
  facts.epsilon = cfg.epsilon;
  facts.delta = cfg.delta;
  facts.lambda1 = problem.partition.sigma1(0);
  facts.lambda_next = problem.partition.lambda_next();
  facts.degenerate_partition = problem.partition.degenerate;
  facts.l_auto = !cfg.l.has_value();
  if (cfg.l) {
    if (*cfg.l > n) throw ConfigError("l", "l = " + std::to_string(*cfg.l) + " exceeds matrix dimension " + std::to_string(n));
    facts.l = *cfg.l;
  } else {
    facts.l_required = required_samples(cfg.k, std::max(problem.tau, 1.0), cfg.delta, cfg.epsilon);
    facts.l_capped = facts.l_required > n;
    facts.l = std::min(facts.l_required, n);
  }
  facts.prob_bound = probabilistic_bound(facts.lambda_next, n, facts.l, cfg.epsilon);
  facts.error_tolerance = 1e-8 * facts.lambda1;
  facts.chernoff_tail = chernoff_tail(cfg.k, problem.tau, facts.l, cfg.epsilon);

  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.threads, [&](Index t) {
    const auto start = std::chrono::steady_clock::now();
    const RngSeed seed{cfg.master_seed, static_cast<std::uint64_t>(t)};
    const ColumnSample sample = sample_uniform(n, facts.l, seed);
    const NystromResult nr = nystrom_extend(problem.a, sample);

    TrialRecord& r = records[static_cast<std::size_t>(t)];
    r.trial = t;
    r.seed = stream_key(seed);
    r.indices_digest = indices_digest(sample);
    r.l = facts.l;
    r.k = cfg.k;
    r.epsilon = cfg.epsilon;
    r.delta = cfg.delta;
    r.spectral_error = nr.spectral_error;
    r.prob_bound = facts.prob_bound;
    r.rank_w = nr.rank_w;
    r.psd_violation = nr.psd_violation;
    r.min_eig_gram = min_eig_gram(problem.partition.u1, sample);
    r.omega1_full_rank = r.min_eig_gram > static_cast<double>(n) * kMachineEpsilon;
    if (r.omega1_full_rank) {
      r.det_bound = deterministic_bound(problem.partition, sample);
      r.pinv_norm_sq = 1.0 / r.min_eig_gram;
    }
    r.error_le_bound = r.spectral_error <= facts.prob_bound + facts.error_tolerance;
    if (cfg.record_timing) {
      r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  ExperimentResult result;
  result.summary = summarize(records, facts);
  result.records = std::move(records);
  return result;
}

std::vector<PairRecord> run_pair_study(const PairStudyConfig& cfg) {
  if (cfg.pairs < 1 || cfg.n_min < 2 || cfg.n_max < cfg.n_min) {
    throw std::invalid_argument("run_pair_study: need pairs >= 1 and 2 <= n_min <= n_max");
  }
  std::vector<PairRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.pairs));
  for (Index p = 0; p < cfg.pairs; ++p) {
    const std::uint64_t key = stream_key({cfg.master_seed, static_cast<std::uint64_t>(p)});
    Rng rng(RngSeed{key, 0});
    const Index n = cfg.n_min + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(cfg.n_max - cfg.n_min + 1)));
    const Index k = 1 + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
    const Index l = 1 + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
    const double lambda1 = std::pow(10.0, -2.0 + 4.0 * rng.uniform01());

    SpectrumSpec spec;
    spec.n = n;
    spec.k = k;
    spec.lambda1 = lambda1;
    switch (p % 4) {
      case 0:
        spec.kind = SpectrumSpec::Kind::exact_rank;
        break;
      case 1:
        spec.kind = SpectrumSpec::Kind::exponential;
        spec.parameter = 0.3 + 0.6 * rng.uniform01();
        break;
      case 2:
        spec.kind = SpectrumSpec::Kind::power_law;
        spec.parameter = 0.5 + 2.5 * rng.uniform01();
        break;
      default: {
        spec.kind = SpectrumSpec::Kind::custom;
        spec.custom.resize(static_cast<std::size_t>(n));
        for (auto& v : spec.custom) v = lambda1 * rng.uniform01();
        std::sort(spec.custom.rbegin(), spec.custom.rend());
        spec.custom[0] = lambda1;
        break;
      }
    }
    const CoherencePlan plan = p % 3 == 2 ? CoherencePlan{CoherencePlan::Kind::spiked, 1} : CoherencePlan{};
    const PlantedInstance inst = planted_instance(spec, plan, RngSeed{key, 1});
    const ColumnSample sample = sample_uniform(n, l, RngSeed{key, 2});
    const NystromResult nr = nystrom_extend(inst.a, sample);

    PairRecord r;
    r.pair = p;
    r.n = n;
    r.k = k;
    r.l = l;
    r.spectrum = spec.kind == SpectrumSpec::Kind::custom ? "custom" : spec.to_string();
    r.coherence = plan.to_string();
    r.lambda1 = inst.partition.sigma1(0);
    r.lambda_next = inst.partition.lambda_next();
    r.spectral_error = nr.spectral_error;
    r.sqrt_error = sqrt_projection_error(inst.a, sample);
    r.psd_violation = nr.psd_violation;
    r.rank_w = nr.rank_w;
    r.omega1_full_rank = omega1_full_rank(inst.partition, sample);
    if (r.omega1_full_rank) {
      r.det_bound = deterministic_bound(inst.partition, sample);
      r.factored_bound = factored_bound(inst.partition, sample);
      r.prob_link = r.lambda_next * (1.0 + pinv_norm_sq_omega1(inst.partition, sample));
    }
    if (k < n) r.davis_kahan = davis_kahan_report(inst.a, nr.extension, k);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ChernoffPoint> chernoff_sweep(const ChernoffSweepConfig& cfg) {
  if (cfg.n < 2 || cfg.trials < 1) throw std::invalid_argument("chernoff_sweep: need n >= 2 and trials >= 1");
  std::vector<ChernoffPoint> points;
  std::uint64_t point_id = 0;
  for (const Index k : cfg.ks) {
    for (const CoherencePlan& plan : cfg.plans) {
      for (const double epsilon : cfg.epsilons) {
        const RngSeed point_seed{cfg.master_seed, point_id++};
        SpectrumSpec spec;
        spec.kind = SpectrumSpec::Kind::exact_rank;
        spec.n = cfg.n;
        spec.k = k;
        const PlantedInstance inst = planted_instance(spec, plan, RngSeed{stream_key(point_seed), kInstanceStream});
        const Matrix& u = inst.partition.u1;

        ChernoffPoint pt;
        pt.n = cfg.n;
        pt.k = k;
        pt.plan = plan.to_string();
        pt.tau = inst.tau;
        pt.epsilon = epsilon;
        pt.l = cfg.n;
        for (Index l = 1; l <= cfg.n; ++l) {
          if (chernoff_tail(k, pt.tau, l, epsilon) <= cfg.tail_max) {
            pt.l = l;
            break;
          }
        }
        pt.tail = chernoff_tail(k, pt.tau, pt.l, epsilon);
        pt.l_in_window = pt.tail >= cfg.tail_min && pt.tail <= cfg.tail_max;
        pt.trials = cfg.trials;

        const double threshold = epsilon * static_cast<double>(pt.l) / static_cast<double>(cfg.n);
        for (Index t = 0; t < cfg.trials; ++t) {
          const ColumnSample s = sample_uniform(cfg.n, pt.l, RngSeed{stream_key(point_seed), static_cast<std::uint64_t>(t)});
          pt.events += min_eig_gram(u, s) <= threshold;
        }
        pt.empirical = static_cast<double>(pt.events) / static_cast<double>(pt.trials);
        const double capped = std::min(pt.tail, 1.0);
        pt.slack = 3.0 * std::sqrt(capped * (1.0 - capped) / static_cast<double>(pt.trials));
        pt.pass = pt.empirical <= pt.tail + pt.slack;
        points.push_back(std::move(pt));
      }
    }
  }
  return points;
}

}  // namespace nystrom
