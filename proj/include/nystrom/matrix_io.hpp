#pragma once

// Plain-text matrix files:
//   line 1:        n
//   lines 2..n+1:  n whitespace-separated decimal reals (row-major)
// Blank trailing lines are ignored.

#include <filesystem>
#include <iosfwd>

#include "nystrom/matcore.hpp"

namespace nystrom {

/// Throws InputDataError (kind and 1-based line number set) for unreadable
/// files, a malformed header, a wrong row/entry count, unparsable or
/// non-finite values, and asymmetry beyond 1e-8 * ||A||_F.
SymMatrix load_matrix(const std::filesystem::path& path);
SymMatrix read_matrix(std::istream& in);

/// Writes every entry with 17 significant digits.
void save_matrix(const std::filesystem::path& path, const SymMatrix& a);
void write_matrix(std::ostream& out, const SymMatrix& a);

}  // namespace nystrom
