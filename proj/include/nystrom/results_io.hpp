#pragma once

// Trial-record serialization. CSV columns (fixed order):
//
//   trial,seed,l,k,epsilon,delta,spectral_error,det_bound,prob_bound,
//   min_eig_gram,pinv_norm_sq,rank_w,omega1_full_rank,error_le_bound,wall_ms
//
// Reals use the shortest decimal form that round-trips exactly; booleans are
// 0/1; an inapplicable bound is the token NA. The JSON form is one document
// {"summary": {...}, "records": [...]} with the same record field names and
// null for NA.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nystrom/experiment.hpp"

namespace nystrom {

inline constexpr const char* kCsvHeader =
    "trial,seed,l,k,epsilon,delta,spectral_error,det_bound,prob_bound,min_eig_gram,pinv_norm_sq,rank_w,"
    "omega1_full_rank,error_le_bound,wall_ms";

std::string format_real(double v);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_results_json(std::ostream& out, const std::vector<TrialRecord>& records, const ExperimentSummary& summary);
void write_summary_json(std::ostream& out, const ExperimentSummary& summary);

/// Writes records (and, for JSON, the summary) to `path`, or stdout when the
/// path is empty. Throws std::invalid_argument for empty records and
/// std::runtime_error carrying the system message on I/O failure.
void emit_results(const std::vector<TrialRecord>& records, const ExperimentSummary& summary, OutputFormat format,
                  const std::filesystem::path& path);

/// Parses CSV produced by write_records_csv. Throws InputDataError with the
/// line number on malformed input.
std::vector<TrialRecord> read_records_csv(std::istream& in);

void write_chernoff_csv(std::ostream& out, const std::vector<ChernoffPoint>& points);

}  // namespace nystrom
