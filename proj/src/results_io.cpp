#include "nystrom/results_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nystrom/errors.hpp"

namespace nystrom {

namespace {

using json = nlohmann::json;

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json record_json(const TrialRecord& r) {
  return json{{"trial", r.trial},
              {"seed", r.seed},
              {"l", r.l},
              {"k", r.k},
              {"epsilon", r.epsilon},
              {"delta", r.delta},
              {"spectral_error", r.spectral_error},
              {"det_bound", optional_json(r.det_bound)},
              {"prob_bound", r.prob_bound},
              {"min_eig_gram", r.min_eig_gram},
              {"pinv_norm_sq", optional_json(r.pinv_norm_sq)},
              {"rank_w", r.rank_w},
              {"omega1_full_rank", r.omega1_full_rank},
              {"error_le_bound", r.error_le_bound},
              {"wall_ms", r.wall_ms}};
}

json summary_json(const ExperimentSummary& s) {
  json j{{"trials", s.trials},
         {"n", s.n},
         {"k", s.k},
         {"l", s.l},
         {"l_auto", s.l_auto},
         {"l_capped", s.l_capped},
         {"tau", s.tau},
         {"lambda1", s.lambda1},
         {"lambda_next", s.lambda_next},
         {"epsilon", s.epsilon},
         {"delta", s.delta},
         {"prob_bound", s.prob_bound},
         {"error_tolerance", s.error_tolerance},
         {"chernoff_tail", s.chernoff_tail},
         {"failures", s.failures},
         {"failure_rate", s.failure_rate},
         {"rank_deficient", s.rank_deficient},
         {"rank_deficiency_rate", s.rank_deficiency_rate},
         {"failures_rank_deficient", s.failures_rank_deficient},
         {"error_quantiles",
          {{"min", s.error.min},
           {"p25", s.error.p25},
           {"median", s.error.median},
           {"p75", s.error.p75},
           {"p95", s.error.p95},
           {"max", s.error.max}}},
         {"worst_psd_violation", s.worst_psd_violation},
         {"degenerate_partition", s.degenerate_partition}};
  if (s.l_auto) j["l_required"] = s.l_required;
  return j;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line, const char* name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputDataError(InputDataError::Kind::bad_number, line,
                         std::string("cannot parse ") + name + " from '" + text + "'");
  }
  return value;
}

std::optional<double> parse_optional(const std::string& text, std::size_t line, const char* name) {
  if (text == "NA") return std::nullopt;
  return parse_field<double>(text, line, name);
}

bool parse_flag(const std::string& text, std::size_t line, const char* name) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw InputDataError(InputDataError::Kind::bad_number, line, std::string(name) + " must be 0 or 1, got '" + text + "'");
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.trial << ',' << r.seed << ',' << r.l << ',' << r.k << ',' << format_real(r.epsilon) << ','
        << format_real(r.delta) << ',' << format_real(r.spectral_error) << ',' << optional_real(r.det_bound) << ','
        << format_real(r.prob_bound) << ',' << format_real(r.min_eig_gram) << ',' << optional_real(r.pinv_norm_sq)
        << ',' << r.rank_w << ',' << (r.omega1_full_rank ? 1 : 0) << ',' << (r.error_le_bound ? 1 : 0) << ','
        << format_real(r.wall_ms) << '\n';
  }
}

void write_results_json(std::ostream& out, const std::vector<TrialRecord>& records, const ExperimentSummary& summary) {
  json doc;
  doc["summary"] = summary_json(summary);
  doc["records"] = json::array();
  for (const auto& r : records) doc["records"].push_back(record_json(r));
  out << doc.dump(2) << '\n';
}

void write_summary_json(std::ostream& out, const ExperimentSummary& summary) {
  out << summary_json(summary).dump(2) << '\n';
}

void emit_results(const std::vector<TrialRecord>& records, const ExperimentSummary& summary, OutputFormat format,
                  const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("emit_results: no records");
  auto write = [&](std::ostream& out) {
    if (format == OutputFormat::csv) {
      write_records_csv(out, records);
    } else {
      write_results_json(out, records, summary);
    }
  };
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "': " + std::strerror(errno));
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw InputDataError(InputDataError::Kind::malformed_header, 1, "missing or unexpected CSV header");
  }
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 15) {
      throw InputDataError(InputDataError::Kind::wrong_count, lineno,
                           "expected 15 fields, found " + std::to_string(f.size()));
    }
    TrialRecord r;
    r.trial = parse_field<Index>(f[0], lineno, "trial");
    r.seed = parse_field<std::uint64_t>(f[1], lineno, "seed");
    r.l = parse_field<Index>(f[2], lineno, "l");
    r.k = parse_field<Index>(f[3], lineno, "k");
    r.epsilon = parse_field<double>(f[4], lineno, "epsilon");
    r.delta = parse_field<double>(f[5], lineno, "delta");
    r.spectral_error = parse_field<double>(f[6], lineno, "spectral_error");
    r.det_bound = parse_optional(f[7], lineno, "det_bound");
    r.prob_bound = parse_field<double>(f[8], lineno, "prob_bound");
    r.min_eig_gram = parse_field<double>(f[9], lineno, "min_eig_gram");
    r.pinv_norm_sq = parse_optional(f[10], lineno, "pinv_norm_sq");
    r.rank_w = parse_field<Index>(f[11], lineno, "rank_w");
    r.omega1_full_rank = parse_flag(f[12], lineno, "omega1_full_rank");
    r.error_le_bound = parse_flag(f[13], lineno, "error_le_bound");
    r.wall_ms = parse_field<double>(f[14], lineno, "wall_ms");
    out.push_back(r);
  }
  return out;
}

void write_chernoff_csv(std::ostream& out, const std::vector<ChernoffPoint>& points) {
  out << "n,k,plan,tau,epsilon,l,l_in_window,tail,trials,events,empirical,slack,pass\n";
  for (const auto& p : points) {
    out << p.n << ',' << p.k << ',' << p.plan << ',' << format_real(p.tau) << ',' << format_real(p.epsilon) << ','
        << p.l << ',' << (p.l_in_window ? 1 : 0) << ',' << format_real(p.tail) << ',' << p.trials << ',' << p.events
        << ',' << format_real(p.empirical) << ',' << format_real(p.slack) << ',' << (p.pass ? 1 : 0) << '\n';
  }
}

}  // namespace nystrom
