// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on
// any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nystrom/analysis.hpp"
#include "nystrom/experiment.hpp"
#include "nystrom/generators.hpp"
#include "nystrom/matcore.hpp"
#include "nystrom/nystrom.hpp"
#include "nystrom/results_io.hpp"
#include "support.hpp"

using namespace nystrom;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

double binomial_slack(double p, Index trials) { return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); }

void run(const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0 && seconds > budget_seconds) {
    out.pass = false;
    out.detail += "; over the time budget";
  }
  if (!out.pass) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, " (%.1f s)", seconds);
  std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << name << ": " << out.detail << timing << std::endl;
}

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

const std::vector<PairRecord>& pairs() {
  static const std::vector<PairRecord> records = run_pair_study({400, 4, 30, 20240601});
  return records;
}

ExperimentConfig planted(const std::string& spectrum, const std::string& plan, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.source.spectrum = SpectrumSpec::parse(spectrum, 256, 4);
  cfg.source.coherence = CoherencePlan::parse(plan);
  cfg.k = 4;
  cfg.epsilon = 0.5;
  cfg.delta = 0.05;
  cfg.trials = 400;
  cfg.master_seed = seed;
  return cfg;
}

double worst_psd_violation = 0.0;

Outcome failure_rate_check(const ExperimentConfig& cfg) {
  const auto result = run_experiment(cfg);
  const auto& s = result.summary;
  worst_psd_violation = std::min(worst_psd_violation, s.worst_psd_violation);
  const double limit = cfg.delta + binomial_slack(cfg.delta, cfg.trials);
  std::ostringstream d;
  d << "tau=" << fmt("%.3f", s.tau) << " l=" << s.l << (s.l_capped ? " (capped at n, required " : " (required ")
    << s.l_required << ") failures=" << s.failures << "/" << s.trials << " rate=" << fmt("%.4f", s.failure_rate)
    << " limit=" << fmt("%.4f", limit) << " max_error/lambda1=" << fmt("%.3g", s.error.max / s.lambda1)
    << " bound/lambda1=" << fmt("%.3g", s.prob_bound / s.lambda1);
  return {s.failure_rate <= limit, d.str()};
}

}  // namespace

int main() {
  run("1 square-root identity", 30.0, [] {
    const auto& ps = pairs();
    Index bad = 0, zero_level = 0;
    double worst_rel = 0.0, worst_zero_gap = 0.0;
    for (const auto& p : ps) {
      if (!testing::identity_close(p.spectral_error, p.sqrt_error, p.n, p.lambda1)) ++bad;
      if (std::max(p.spectral_error, p.sqrt_error) <= testing::zero_threshold(p.lambda1)) {
        ++zero_level;
        worst_zero_gap = std::max(worst_zero_gap, std::abs(p.spectral_error - p.sqrt_error) / p.lambda1);
      } else {
        worst_rel = std::max(worst_rel, testing::rel_diff(p.spectral_error, p.sqrt_error));
      }
    }
    std::ostringstream d;
    d << ps.size() << " pairs, mismatches=" << bad << ", worst relative gap=" << fmt("%.2e", worst_rel) << " over "
      << ps.size() - static_cast<std::size_t>(zero_level) << " nonzero errors, " << zero_level
      << " pairs with both errors below 1e-8 lambda1 (worst gap/lambda1 " << fmt("%.2e", worst_zero_gap) << ")";
    return Outcome{bad == 0 && ps.size() >= 200, d.str()};
  });

  run("2 deterministic bound", 0.0, [] {
    Index checked = 0, violations = 0;
    double worst_ratio = 0.0;
    for (const auto& p : pairs()) {
      if (!p.omega1_full_rank) continue;
      ++checked;
      if (p.spectral_error > *p.det_bound + 1e-8) ++violations;
      if (*p.det_bound > 0.0) worst_ratio = std::max(worst_ratio, p.spectral_error / *p.det_bound);
    }
    std::ostringstream d;
    d << checked << " full-rank pairs, violations=" << violations << ", max error/bound=" << fmt("%.4f", worst_ratio);
    return Outcome{violations == 0 && checked > 0, d.str()};
  });

  run("3 exact recovery, low coherence", 300.0, [] { return failure_rate_check(planted("exact", "low", 3)); });
  run("3b exact recovery, coherence one", 300.0, [] { return failure_rate_check(planted("exact", "flat", 33)); });
  run("4 relative-error bound, low coherence", 300.0, [] { return failure_rate_check(planted("exp:0.5", "low", 4)); });
  run("4b relative-error bound, coherence one", 300.0,
      [] { return failure_rate_check(planted("exp:0.5", "flat", 44)); });

  run("5 Chernoff tail", 600.0, [] {
    ChernoffSweepConfig cfg;
    cfg.master_seed = 5;
    cfg.plans.push_back(CoherencePlan{CoherencePlan::Kind::flat, 0});
    const auto points = chernoff_sweep(cfg);
    std::ostringstream d;
    bool all = true;
    for (const auto& p : points) {
      all = all && p.pass;
      d << "\n    k=" << p.k << " " << p.plan << " tau=" << fmt("%.2f", p.tau) << " eps=" << p.epsilon << " l=" << p.l
        << (p.l_in_window ? "" : " (tail window unreachable)") << " empirical=" << fmt("%.4f", p.empirical)
        << " tail=" << fmt("%.4f", p.tail) << " slack=" << fmt("%.4f", p.slack) << (p.pass ? " ok" : " VIOLATED");
    }
    return Outcome{all && !points.empty(), std::to_string(points.size()) + " grid points" + d.str()};
  });

  run("6 coherence properties", 0.0, [] {
    Index range_bad = 0, invariance_bad = 0, spiked_bad = 0;
    double worst_invariance = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      Rng rng({6, i});
      const Index n = 2 + static_cast<Index>(rng.uniform_below(99));
      const Index k = 1 + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      const Matrix u = random_orthonormal(n, k, {6000, i});
      const double mu = coherence(u);
      const double upper = static_cast<double>(n) / static_cast<double>(k);
      if (mu < 1.0 - 1e-9 || mu > upper + 1e-9) ++range_bad;
      const Matrix q = random_orthonormal(k, k, {6001, i});
      const double gap = std::abs(coherence(u * q) - mu);
      worst_invariance = std::max(worst_invariance, gap);
      if (gap > 1e-9) ++invariance_bad;
    }
    for (std::uint64_t i = 0; i < 50; ++i) {
      const Index n = 64, k = 1 + static_cast<Index>(i % 8);
      const Index m = 1 + static_cast<Index>(i % static_cast<std::uint64_t>(k));
      const auto inst =
          planted_instance(SpectrumSpec::parse("exp:0.5", n, k), CoherencePlan{CoherencePlan::Kind::spiked, m}, {6002, i});
      if (std::abs(coherence(inst.partition.u1) - static_cast<double>(n) / static_cast<double>(k)) > 1e-8) ++spiked_bad;
    }
    std::ostringstream d;
    d << "range violations=" << range_bad << "/1000, invariance violations=" << invariance_bad
      << " (worst " << fmt("%.2e", worst_invariance) << "), spiked misses=" << spiked_bad << "/50";
    return Outcome{range_bad == 0 && invariance_bad == 0 && spiked_bad == 0, d.str()};
  });

  run("7 Davis-Kahan bound", 0.0, [] {
    Index applicable = 0, violations = 0;
    double worst_ratio = 0.0;
    for (const auto& p : pairs()) {
      if (applicable == 100) break;
      if (!p.davis_kahan || !p.davis_kahan->bound) continue;
      ++applicable;
      const auto& dk = *p.davis_kahan;
      if (dk.distance > *dk.bound + 1e-8) ++violations;
      if (*dk.bound > 1e-8) worst_ratio = std::max(worst_ratio, dk.distance / *dk.bound);
    }
    std::ostringstream d;
    d << applicable << " pairs with a positive gap, violations=" << violations
      << ", max distance/bound (bound > 1e-8)=" << fmt("%.4f", worst_ratio);
    return Outcome{violations == 0 && applicable == 100, d.str()};
  });

  run("8 PSD preservation and pseudoinverse", 0.0, [] {
    Index psd_bad = 0;
    for (const auto& p : pairs()) {
      if (p.psd_violation < -1e-8 * p.lambda1) ++psd_bad;
    }
    const bool trials_ok = worst_psd_violation >= -1e-8;
    Index penrose_bad = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      Rng rng({8, i});
      const Index rows = 1 + static_cast<Index>(rng.uniform_below(30));
      const Index cols = 1 + static_cast<Index>(rng.uniform_below(30));
      const Index rank = 1 + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(std::min(rows, cols))));
      const Matrix a = testing::gaussian(rows, rank, 8000 + i) * testing::gaussian(rank, cols, 9000 + i);
      const Matrix x = pinv(a);
      const double na = testing::fro(a), nx = testing::fro(x);
      const Matrix ax = a * x, xa = x * a;
      const double c1 = testing::fro(a * x * a - a) / na;
      const double c2 = testing::fro(x * a * x - x) / nx;
      const double c3 = testing::fro(ax - ax.transpose()) / (na * nx);
      const double c4 = testing::fro(xa - xa.transpose()) / (na * nx);
      const double m = std::max({c1, c2, c3, c4});
      worst = std::max(worst, m);
      if (m > 1e-8) ++penrose_bad;
    }
    std::ostringstream d;
    d << "pair extensions below -1e-8 lambda1: " << psd_bad << "/" << pairs().size()
      << ", worst trial violation/lambda1=" << fmt("%.2e", worst_psd_violation) << ", Penrose failures=" << penrose_bad
      << "/100 (worst residual " << fmt("%.2e", worst) << ")";
    return Outcome{psd_bad == 0 && trials_ok && penrose_bad == 0, d.str()};
  });

  run("9 reproducibility", 0.0, [] {
    auto cfg = planted("exp:0.5", "low", 9);
    cfg.trials = 40;
    cfg.l = 60;
    auto csv = [&cfg] {
      std::ostringstream out;
      write_records_csv(out, run_experiment(cfg).records);
      return out.str();
    };
    const std::string first = csv();
    const std::string second = csv();
    cfg.threads = 4;
    const std::string threaded = csv();
    const bool ok = first == second && first == threaded;
    return Outcome{ok, std::string("serial rerun ") + (first == second ? "identical" : "DIFFERS") + ", 4 threads " +
                           (first == threaded ? "identical" : "DIFFERS") + " (" + std::to_string(first.size()) + " bytes)"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
