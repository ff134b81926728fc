#pragma once

// Coherence, the sampled eigenbasis blocks Omega1/Omega2, and the error
// bounds for uniformly sampled Nystrom extensions.

#include <optional>

#include "nystrom/matcore.hpp"
#include "nystrom/sampling.hpp"

namespace nystrom {

inline constexpr double kDefaultEpsilon = 0.5;

/// mu0(U) = (n/k) * max_i ||row_i(U)||^2. Throws std::invalid_argument when
/// ||U^t U - I||_2 > 1e-8 (the message carries the deviation).
double coherence(const Matrix& u);

struct OmegaMatrices {
  Matrix omega1;  // U1^t S, k x l
  Matrix omega2;  // U2^t S, (n-k) x l
};

OmegaMatrices omega_matrices(const SpectralPartition& p, const ColumnSample& s);

/// lambda_min(U^t S S^t U): the smallest eigenvalue of the Gram matrix of the
/// sampled rows of U.
double min_eig_gram(const Matrix& u, const ColumnSample& s);

/// Omega1 has full row rank iff min_eig_gram(U1, s) > n * machine epsilon.
bool omega1_full_rank(const SpectralPartition& p, const ColumnSample& s);

/// ||Omega1^+||_2^2 = 1 / min_eig_gram(U1, s). Throws BoundInapplicable when
/// Omega1 is rank deficient.
double pinv_norm_sq_omega1(const SpectralPartition& p, const ColumnSample& s);

/// ||Sigma2||_2 * (1 + ||Omega2 Omega1^+||_2^2). Throws BoundInapplicable when
/// Omega1 is rank deficient.
double deterministic_bound(const SpectralPartition& p, const ColumnSample& s);

/// ||Sigma2||_2 * (1 + ||Omega2||_2^2 * ||Omega1^+||_2^2), the intermediate
/// link between deterministic_bound and the probabilistic bound.
double factored_bound(const SpectralPartition& p, const ColumnSample& s);

/// Smallest integer l >= 2 tau k log(k/delta) / (1-epsilon)^2.
/// Requires delta, epsilon in (0,1), tau >= 1, k >= 1.
Index required_samples(Index k, double tau, double delta, double epsilon = kDefaultEpsilon);

/// lambda_{k+1} * (1 + n / (epsilon l)).
double probabilistic_bound(double lambda_next, Index n, Index l, double epsilon = kDefaultEpsilon);

/// k * exp(-(1-epsilon)^2 l / (2 k tau)), epsilon in [0,1].
double chernoff_tail(Index k, double tau, Index l, double epsilon);

/// ||P_U - P_V||_2 for two n x k orthonormal bases.
double davis_kahan_distance(const Matrix& u, const Matrix& v);

/// ||A - A~||_2 / (lambda_k(A) - lambda_{k+1}(A~)). Requires 1 <= k < n.
/// Throws BoundInapplicable when the gap is not positive.
double davis_kahan_bound(const SymMatrix& a, const SymMatrix& a_tilde, Index k);

/// C lambda_j / (lambda_k - lambda_{k+1} - C lambda_j), the form obtained by
/// substituting an a-priori bound ||A - A~||_2 <= C lambda_j (passed as
/// `error_bound`). Throws BoundInapplicable when the denominator is not positive.
double davis_kahan_relative_bound(double lambda_k, double lambda_next, double error_bound);

struct DavisKahanReport {
  double distance = 0.0;                  // between dominant k-subspaces of A and A~
  std::optional<double> bound;            // primitive quotient; empty if gap violated
  std::optional<double> relative_bound;   // substituted form using the measured error
  double error = 0.0;                     // ||A - A~||_2
};

DavisKahanReport davis_kahan_report(const SymMatrix& a, const SymMatrix& a_tilde, Index k);

struct BoundReport {
  Index k = 0;
  double tau = 0.0;
  double epsilon = kDefaultEpsilon;
  double delta = 0.0;
  Index l_required = 0;
  double prob_bound = 0.0;
  std::optional<double> det_bound;  // only when a sample is supplied and Omega1 has full rank
  double chernoff_tail = 0.0;
};

/// Everything computable from scalars: l_required, and prob_bound and
/// chernoff_tail evaluated at the given l.
BoundReport bound_report(Index n, Index k, double tau, double delta, double epsilon, Index l, double lambda_next);

}  // namespace nystrom
