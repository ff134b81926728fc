#include "nystrom/sampling.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace nystrom {

ColumnSample::ColumnSample(Index n, std::vector<Index> indices) : n_(n), indices_(std::move(indices)) {
  const auto l = static_cast<Index>(indices_.size());
  if (l < 1 || l > n_) {
    throw std::invalid_argument("sample size " + std::to_string(l) + " outside [1, " + std::to_string(n_) + "]");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  for (const Index i : indices_) {
    if (i < 0 || i >= n_) throw std::invalid_argument("sample index " + std::to_string(i) + " out of range");
    if (seen[static_cast<std::size_t>(i)]) throw std::invalid_argument("duplicate sample index " + std::to_string(i));
    seen[static_cast<std::size_t>(i)] = true;
  }
}

ColumnSample sample_uniform(Index n, Index l, const RngSeed& seed) {
  if (n < 1 || l < 1 || l > n) {
    throw std::invalid_argument("sample_uniform: need 1 <= l <= n, got l = " + std::to_string(l) +
                                ", n = " + std::to_string(n));
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  for (Index i = 0; i < l; ++i) {
    const auto j = i + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  perm.resize(static_cast<std::size_t>(l));
  return ColumnSample(n, std::move(perm));
}

Matrix selection_matrix(const ColumnSample& s) {
  Matrix out = Matrix::Zero(s.n(), s.size());
  for (Index j = 0; j < s.size(); ++j) out(s.indices()[static_cast<std::size_t>(j)], j) = 1.0;
  return out;
}

ColumnsAndCore extract_cw(const SymMatrix& a, const ColumnSample& s) {
  if (a.n() != s.n()) {
    throw std::invalid_argument("extract_cw: matrix dimension " + std::to_string(a.n()) +
                                " does not match sample dimension " + std::to_string(s.n()));
  }
  const auto& idx = s.indices();
  const Matrix c = a.matrix()(Eigen::all, idx);
  Matrix w = c(idx, Eigen::all);
  return {c, SymMatrix(w)};
}

Matrix gather_rows(const Matrix& m, const ColumnSample& s) {
  if (m.rows() != s.n()) throw std::invalid_argument("gather_rows: row count does not match sample dimension");
  return m(s.indices(), Eigen::all);
}

std::uint64_t indices_digest(const ColumnSample& s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const Index i : s.indices()) {
    auto v = static_cast<std::uint64_t>(i);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

}  // namespace nystrom
