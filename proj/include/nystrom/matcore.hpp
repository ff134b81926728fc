#pragma once

// Dense symmetric linear-algebra kernels.

#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace nystrom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();

/// Dense real symmetric matrix. Construction replaces the input by its
/// symmetric part (A + A^t)/2, so entries(i,j) == entries(j,i) exactly.
class SymMatrix {
 public:
  /// Throws std::invalid_argument for empty, non-square or non-finite input,
  /// or if max |a_ij - a_ji| exceeds `asymmetry_tol` * ||A||_F.
  explicit SymMatrix(const Matrix& entries, double asymmetry_tol = 1e-8);

  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const Vector& d);

  Index n() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

/// Eigenpairs ordered so that values(0) >= values(1) >= ...; column j of
/// `vectors` belongs to values(j).
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// Split of an eigendecomposition into the dominant k eigenpairs (u1, sigma1)
/// and the remaining n-k (u2, sigma2).
struct SpectralPartition {
  Matrix u1;
  Matrix u2;
  Vector sigma1;
  Vector sigma2;
  // lambda_k == lambda_{k+1} (up to round-off): the dominant subspace is not
  // unique and u1 is one deterministic choice.
  bool degenerate = false;

  Index n() const noexcept { return u1.rows(); }
  Index k() const noexcept { return u1.cols(); }
  // lambda_{k+1}, or 0 when k == n.
  double lambda_next() const noexcept { return sigma2.size() > 0 ? sigma2(0) : 0.0; }
};

/// Symmetric eigendecomposition (Householder tridiagonalization + implicit QR).
/// Eigenvalues are sorted descending with ties kept in solver order.
/// Throws NonConvergenceError when the QR iteration fails.
EigenDecomposition sym_eig(const SymMatrix& a);

/// Eigenvalues only, descending.
Vector eigenvalues(const SymMatrix& a);

struct JacobiOptions {
  double relative_tolerance = 1e-12;  // against ||A||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver. Sweeps until max |off-diagonal| <=
/// tol * ||A||_F. Same ordering contract as sym_eig. Throws
/// NonConvergenceError carrying the residual after `max_sweeps`.
EigenDecomposition jacobi_eig(const SymMatrix& a, const JacobiOptions& options = {});

/// Eigendecomposition of a PSD matrix with eigenvalues in
/// [-1e-10 * lambda_1, 0) clamped to zero. Throws NotPsdError below that.
EigenDecomposition psd_eig(const SymMatrix& a);

/// Unique PSD square root.
SymMatrix psd_sqrt(const SymMatrix& a);

/// Default relative rank cutoff: max(rows, cols) * machine epsilon.
double default_rank_tol(const Matrix& m);

/// Moore-Penrose pseudoinverse via SVD. Singular values <= rank_tol * sigma_max
/// are treated as zero; rank_tol defaults to default_rank_tol(m).
Matrix pinv(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

struct SymPinv {
  Matrix inverse;
  Index rank = 0;
};

/// Pseudoinverse of a symmetric matrix through its eigendecomposition, with
/// |lambda| <= rank_tol * max|lambda| treated as zero.
SymPinv sym_pinv(const SymMatrix& a, std::optional<double> rank_tol = std::nullopt);

/// Numerical rank under the pinv cutoff.
Index numerical_rank(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

/// Largest singular value: sqrt of the largest eigenvalue of the smaller Gram
/// matrix, or max |lambda| directly when M is exactly symmetric. Returns 0 for
/// empty matrices.
double spectral_norm(const Matrix& m);

/// Orthogonal projector onto range(M), built from the left singular vectors
/// above the pinv cutoff.
SymMatrix projector(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

/// First k eigenpairs to (u1, sigma1), the rest to (u2, sigma2).
/// Requires 1 <= k <= n.
SpectralPartition partition(const EigenDecomposition& ed, Index k);

/// ||M^t M - I||_2, the deviation of M from having orthonormal columns.
double orthonormality_error(const Matrix& m);

}  // namespace nystrom
