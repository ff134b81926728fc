#pragma once

// Test-only helpers and independent oracles. Nothing here calls the library
// routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nystrom/matcore.hpp"
#include "nystrom/rng.hpp"

namespace testing {

using nystrom::Index;
using nystrom::Matrix;
using nystrom::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  nystrom::Rng rng({seed, 0xABCD});
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix g = gaussian(n, n, seed);
  return 0.5 * (g + g.transpose());
}

// G G^t with G n x r: PSD with rank r (generically).
inline Matrix random_psd(Index n, Index r, std::uint64_t seed) {
  const Matrix g = gaussian(n, r, seed);
  return g * g.transpose();
}

// Largest singular value by power iteration on M^t M, run to stagnation.
inline double power_iteration_norm(const Matrix& m, int iterations = 5000) {
  Vector x = Vector::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
  x(0) += 0.37;
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector y = m.transpose() * (m * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    const double next = std::sqrt(norm);
    if (std::abs(next - estimate) <= 1e-15 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return (m * x).norm();
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Two error values agree when they match within 1e-8 relative plus the
// round-off of a spectral norm at scale lambda1 (10 n eps lambda1), or when
// both are at most 1e-8 lambda1 (the exact-recovery threshold, below which an
// error counts as zero).
inline double zero_threshold(double lambda1) { return 1e-8 * lambda1; }

inline double roundoff_floor(Index n, double lambda1) {
  return 10.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * lambda1;
}

inline bool identity_close(double a, double b, Index n, double lambda1) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= 1e-8 * scale + roundoff_floor(n, lambda1) || scale <= zero_threshold(lambda1);
}

// Frobenius norm bound ||M||_2 <= ||M||_F, used for tolerance checks that
// must not depend on the library's spectral norm.
inline double fro(const Matrix& m) { return m.norm(); }

// Brute-force Nystrom extension through an explicit SVD-based pseudoinverse.
inline Matrix brute_force_nystrom(const Matrix& a, const std::vector<Index>& idx, double rank_tol) {
  const Matrix c = a(Eigen::all, idx);
  const Matrix w = a(idx, idx);
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > rank_tol * s(0)) inv(i) = 1.0 / s(i);
  }
  const Matrix wp = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return c * wp * c.transpose();
}

// Explicit k x k Gram matrix (U^t S)(S^t U) by summing outer products of
// the sampled rows.
inline Matrix explicit_gram(const Matrix& u, const std::vector<Index>& idx) {
  Matrix g = Matrix::Zero(u.cols(), u.cols());
  for (const Index i : idx) g += u.row(i).transpose() * u.row(i);
  return g;
}

}  // namespace testing
