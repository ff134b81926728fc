#include "nystrom/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nystrom/errors.hpp"

namespace nystrom {

namespace {

Matrix outer_gram(const Matrix& u) {
  Matrix p = Matrix::Zero(u.rows(), u.rows());
  p.selfadjointView<Eigen::Lower>().rankUpdate(u);
  return p.selfadjointView<Eigen::Lower>();
}

double residual_norm(const SpectralPartition& p) {
  return p.sigma2.size() > 0 ? p.sigma2.cwiseAbs().maxCoeff() : 0.0;
}

void require_full_rank(const SpectralPartition& p, const ColumnSample& s, double gram_min) {
  const double threshold = static_cast<double>(p.n()) * kMachineEpsilon;
  if (!(gram_min > threshold)) {
    throw BoundInapplicable("Omega1 is rank deficient: lambda_min(U1^t S S^t U1) = " + std::to_string(gram_min) +
                            " with l = " + std::to_string(s.size()) + ", k = " + std::to_string(p.k()));
  }
}

void require_epsilon_open(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
}

}  // namespace

double coherence(const Matrix& u) {
  if (u.rows() == 0 || u.cols() == 0) throw std::invalid_argument("coherence: empty basis");
  const double deviation = orthonormality_error(u);
  if (deviation > 1e-8) {
    throw std::invalid_argument("coherence: columns are not orthonormal, ||U^t U - I||_2 = " +
                                std::to_string(deviation));
  }
  const double n = static_cast<double>(u.rows());
  const double k = static_cast<double>(u.cols());
  return n / k * u.rowwise().squaredNorm().maxCoeff();
}

OmegaMatrices omega_matrices(const SpectralPartition& p, const ColumnSample& s) {
  if (p.n() != s.n()) throw std::invalid_argument("omega_matrices: partition and sample dimensions differ");
  return {gather_rows(p.u1, s).transpose(), gather_rows(p.u2, s).transpose()};
}

double min_eig_gram(const Matrix& u, const ColumnSample& s) {
  const Matrix rows = gather_rows(u, s);
  Matrix gram = Matrix::Zero(u.cols(), u.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  const Vector lambdas = eigenvalues(SymMatrix(gram));
  return lambdas(lambdas.size() - 1);
}

bool omega1_full_rank(const SpectralPartition& p, const ColumnSample& s) {
  return min_eig_gram(p.u1, s) > static_cast<double>(p.n()) * kMachineEpsilon;
}

double pinv_norm_sq_omega1(const SpectralPartition& p, const ColumnSample& s) {
  const double gram_min = min_eig_gram(p.u1, s);
  require_full_rank(p, s, gram_min);
  return 1.0 / gram_min;
}

double deterministic_bound(const SpectralPartition& p, const ColumnSample& s) {
  require_full_rank(p, s, min_eig_gram(p.u1, s));
  const OmegaMatrices omega = omega_matrices(p, s);
  const double coupling = spectral_norm(omega.omega2 * pinv(omega.omega1));
  return residual_norm(p) * (1.0 + coupling * coupling);
}

double factored_bound(const SpectralPartition& p, const ColumnSample& s) {
  const double inv_sq = pinv_norm_sq_omega1(p, s);
  const double omega2_norm = spectral_norm(omega_matrices(p, s).omega2);
  return residual_norm(p) * (1.0 + omega2_norm * omega2_norm * inv_sq);
}

Index required_samples(Index k, double tau, double delta, double epsilon) {
  if (k < 1) throw std::invalid_argument("required_samples: k must be >= 1");
  if (!(tau >= 1.0) || !std::isfinite(tau)) throw std::invalid_argument("required_samples: tau must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_samples: delta must lie in (0, 1)");
  require_epsilon_open(epsilon);

  const double kd = static_cast<double>(k);
  const double rhs = 2.0 * tau * kd * std::log(kd / delta) / ((1.0 - epsilon) * (1.0 - epsilon));
  auto l = static_cast<Index>(std::ceil(rhs));
  // Absorb round-off in log() that pushes an exact integer just above itself.
  if (l > 1 && static_cast<double>(l - 1) >= rhs * (1.0 - 1e-12)) --l;
  return std::max<Index>(l, 1);
}

double probabilistic_bound(double lambda_next, Index n, Index l, double epsilon) {
  require_epsilon_open(epsilon);
  if (n < 1 || l < 1) throw std::invalid_argument("probabilistic_bound: n and l must be >= 1");
  return lambda_next * (1.0 + static_cast<double>(n) / (epsilon * static_cast<double>(l)));
}

double chernoff_tail(Index k, double tau, Index l, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("chernoff_tail: epsilon must lie in [0, 1]");
  if (k < 1 || !(tau > 0.0) || l < 0) throw std::invalid_argument("chernoff_tail: need k >= 1, tau > 0, l >= 0");
  const double kd = static_cast<double>(k);
  return kd * std::exp(-(1.0 - epsilon) * (1.0 - epsilon) * static_cast<double>(l) / (2.0 * kd * tau));
}

double davis_kahan_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("davis_kahan_distance: bases must have the same shape");
  }
  return spectral_norm(outer_gram(u) - outer_gram(v));
}

double davis_kahan_bound(const SymMatrix& a, const SymMatrix& a_tilde, Index k) {
  if (a.n() != a_tilde.n()) throw std::invalid_argument("davis_kahan_bound: dimension mismatch");
  if (k < 1 || k >= a.n()) throw std::invalid_argument("davis_kahan_bound: need 1 <= k < n");
  const double gap = eigenvalues(a)(k - 1) - eigenvalues(a_tilde)(k);
  if (!(gap > 0.0)) {
    throw BoundInapplicable("eigengap lambda_k(A) - lambda_{k+1}(A~) = " + std::to_string(gap) + " is not positive");
  }
  return spectral_norm(a.matrix() - a_tilde.matrix()) / gap;
}

double davis_kahan_relative_bound(double lambda_k, double lambda_next, double error_bound) {
  const double denominator = lambda_k - lambda_next - error_bound;
  if (!(denominator > 0.0)) {
    throw BoundInapplicable("error bound " + std::to_string(error_bound) + " is not below the eigengap");
  }
  return error_bound / denominator;
}

DavisKahanReport davis_kahan_report(const SymMatrix& a, const SymMatrix& a_tilde, Index k) {
  if (a.n() != a_tilde.n()) throw std::invalid_argument("davis_kahan_report: dimension mismatch");
  if (k < 1 || k >= a.n()) throw std::invalid_argument("davis_kahan_report: need 1 <= k < n");
  const EigenDecomposition ea = sym_eig(a);
  const EigenDecomposition et = sym_eig(a_tilde);

  DavisKahanReport report;
  report.error = spectral_norm(a.matrix() - a_tilde.matrix());
  report.distance = davis_kahan_distance(ea.vectors.leftCols(k), et.vectors.leftCols(k));
  const double gap = ea.values(k - 1) - et.values(k);
  if (gap > 0.0) report.bound = report.error / gap;
  const double relative_denominator = ea.values(k - 1) - ea.values(k) - report.error;
  if (relative_denominator > 0.0) report.relative_bound = report.error / relative_denominator;
  return report;
}

BoundReport bound_report(Index n, Index k, double tau, double delta, double epsilon, Index l, double lambda_next) {
  BoundReport r;
  r.k = k;
  r.tau = tau;
  r.epsilon = epsilon;
  r.delta = delta;
  r.l_required = required_samples(k, tau, delta, epsilon);
  r.prob_bound = probabilistic_bound(lambda_next, n, l, epsilon);
  r.chernoff_tail = chernoff_tail(k, tau, l, epsilon);
  return r;
}

}  // namespace nystrom
