#pragma once

// Monte-Carlo harness: repeated uniformly sampled Nystrom extensions of a
// fixed matrix, each trial checked against the deterministic and
// probabilistic error bounds.
//
// Reproducibility contract: trial t samples with RngSeed{master_seed, t};
// generated matrices use RngSeed{master_seed, kInstanceStream}. Records are
// stored by trial index, so output does not depend on the thread count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nystrom/analysis.hpp"
#include "nystrom/generators.hpp"
#include "nystrom/matcore.hpp"

namespace nystrom {

inline constexpr std::uint64_t kInstanceStream = 0xFFFFFFFFFFFFFFFFULL;

enum class OutputFormat { csv, json };

struct MatrixSource {
  std::optional<std::filesystem::path> path;  // load from file when set
  SpectrumSpec spectrum;                      // otherwise generate
  CoherencePlan coherence;
};

struct ExperimentConfig {
  MatrixSource source;
  Index k = 1;
  double epsilon = kDefaultEpsilon;
  double delta = 0.05;
  std::optional<Index> l;  // empty: required_samples(k, tau, delta, epsilon), capped at n
  Index trials = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  bool record_timing = false;  // wall_ms is 0 unless set, keeping output byte-stable
  std::filesystem::path output;  // empty: stdout
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config document. Recognized keys: matrix | generator
/// {spectrum, n, lambda1, coherence}, k, epsilon, delta, l (integer or
/// "auto"), trials, seed, threads, timing, out, format.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialRecord {
  Index trial = 0;
  std::uint64_t seed = 0;  // stream key of RngSeed{master_seed, trial}
  std::uint64_t indices_digest = 0;
  Index l = 0;
  Index k = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double spectral_error = 0.0;
  std::optional<double> det_bound;  // empty: Omega1 rank deficient
  double prob_bound = 0.0;
  double min_eig_gram = 0.0;
  std::optional<double> pinv_norm_sq;  // empty: Omega1 rank deficient
  Index rank_w = 0;
  bool omega1_full_rank = false;
  bool error_le_bound = false;
  double wall_ms = 0.0;
  double psd_violation = 0.0;
};

struct Quantiles {
  double min = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, p95 = 0.0, max = 0.0;
};

struct ExperimentSummary {
  Index trials = 0;
  Index n = 0;
  Index k = 0;
  Index l = 0;
  bool l_auto = false;
  Index l_required = 0;  // only meaningful when l_auto
  bool l_capped = false;  // l_required exceeded n
  double tau = 0.0;
  double lambda1 = 0.0;
  double lambda_next = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double prob_bound = 0.0;
  double error_tolerance = 0.0;  // absolute slack in error_le_bound
  double chernoff_tail = 0.0;
  Index failures = 0;  // spectral_error > prob_bound + error_tolerance
  Index rank_deficient = 0;
  Index failures_rank_deficient = 0;
  double failure_rate = 0.0;
  double rank_deficiency_rate = 0.0;
  Quantiles error;
  double worst_psd_violation = 0.0;  // min over trials of psd_violation / lambda1
  bool degenerate_partition = false;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Recomputes the summary from records and instance facts; run_experiment
/// uses the same routine.
ExperimentSummary summarize(const std::vector<TrialRecord>& records, const ExperimentSummary& facts);

// Random (A, S) pairs with mixed spectra for checking the identities and
// bounds that hold for every sample.
struct PairStudyConfig {
  Index pairs = 200;
  Index n_min = 4;
  Index n_max = 30;
  std::uint64_t master_seed = 0;
};

struct PairRecord {
  Index pair = 0;
  Index n = 0, k = 0, l = 0;
  std::string spectrum;
  std::string coherence;
  double lambda1 = 0.0;
  double lambda_next = 0.0;
  double spectral_error = 0.0;
  double sqrt_error = 0.0;
  bool omega1_full_rank = false;
  std::optional<double> det_bound;
  std::optional<double> factored_bound;
  std::optional<double> prob_link;  // lambda_{k+1} (1 + ||Omega1^+||^2)
  double psd_violation = 0.0;
  Index rank_w = 0;
  std::optional<DavisKahanReport> davis_kahan;  // k < n only
};

std::vector<PairRecord> run_pair_study(const PairStudyConfig& cfg);

struct ChernoffSweepConfig {
  Index n = 128;
  std::vector<Index> ks{2, 4};
  std::vector<CoherencePlan> plans{CoherencePlan{CoherencePlan::Kind::low, 0},
                                   CoherencePlan{CoherencePlan::Kind::spiked, 1}};
  std::vector<double> epsilons{0.25, 0.5};
  Index trials = 2000;
  double tail_min = 0.01;
  double tail_max = 0.5;
  std::uint64_t master_seed = 0;
};

struct ChernoffPoint {
  Index n = 0, k = 0;
  std::string plan;
  double tau = 0.0;
  double epsilon = 0.0;
  Index l = 0;
  bool l_in_window = false;  // some l <= n puts the tail in [tail_min, tail_max]
  double tail = 0.0;
  Index trials = 0;
  Index events = 0;  // trials with min_eig_gram <= epsilon l / n
  double empirical = 0.0;
  double slack = 0.0;  // 3 * sqrt(t (1 - t) / trials), t = min(tail, 1)
  bool pass = false;
};

/// For each grid point, picks the smallest l whose tail is <= tail_max (or n
/// when none is) and measures how often lambda_min(U^t S S^t U) <= eps l / n.
std::vector<ChernoffPoint> chernoff_sweep(const ChernoffSweepConfig& cfg);

}  // namespace nystrom
