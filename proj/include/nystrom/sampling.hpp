#pragma once

#include <vector>

#include "nystrom/matcore.hpp"
#include "nystrom/rng.hpp"

namespace nystrom {

/// An ordered set of l distinct column indices in [0, n); equivalently the
/// n x l sampling matrix whose column j is e_{indices[j]}.
class ColumnSample {
 public:
  /// Throws std::invalid_argument unless 1 <= l <= n and indices are distinct
  /// and in range.
  ColumnSample(Index n, std::vector<Index> indices);

  Index n() const noexcept { return n_; }
  Index size() const noexcept { return static_cast<Index>(indices_.size()); }
  const std::vector<Index>& indices() const noexcept { return indices_; }

 private:
  Index n_;
  std::vector<Index> indices_;
};

/// First l entries of a Fisher-Yates shuffle of 0..n-1 driven by `seed`.
ColumnSample sample_uniform(Index n, Index l, const RngSeed& seed);

/// The n x l matrix S with S^t S = I_l.
Matrix selection_matrix(const ColumnSample& s);

struct ColumnsAndCore {
  Matrix c;     // A S
  SymMatrix w;  // S^t A S
};

/// Gathers C and W by indexing; no arithmetic is performed on the entries.
ColumnsAndCore extract_cw(const SymMatrix& a, const ColumnSample& s);

/// Rows `s.indices()` of `m`, in sample order (equivalently (S^t M)).
Matrix gather_rows(const Matrix& m, const ColumnSample& s);

/// 64-bit FNV-1a digest of the index sequence.
std::uint64_t indices_digest(const ColumnSample& s) noexcept;

}  // namespace nystrom
