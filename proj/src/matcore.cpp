#include "nystrom/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Jacobi>
#include <Eigen/SVD>

#include "nystrom/errors.hpp"

namespace nystrom {

namespace {

// Reorders eigenpairs descending; equal values keep their incoming order.
EigenDecomposition sorted_descending(const Vector& values, const Matrix& vectors) {
  const Index n = values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });

  EigenDecomposition ed{Vector(n), Matrix(vectors.rows(), n)};
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    ed.values(j) = values(src);
    ed.vectors.col(j) = vectors.col(src);
  }
  return ed;
}

double max_off_diagonal(const Matrix& a) {
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < j; ++i) worst = std::max(worst, std::abs(a(i, j)));
  }
  return worst;
}

Matrix symmetric_gram(const Matrix& m) {
  // M^t M for tall input, M M^t for wide; lower triangle via rank update.
  const bool tall = m.rows() >= m.cols();
  const Index d = tall ? m.cols() : m.rows();
  Matrix g = Matrix::Zero(d, d);
  if (tall) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  } else {
    g.selfadjointView<Eigen::Lower>().rankUpdate(m);
  }
  return g.selfadjointView<Eigen::Lower>();
}

bool exactly_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& entries, double asymmetry_tol) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw std::invalid_argument("SymMatrix requires a non-empty square matrix, got " +
                                std::to_string(entries.rows()) + "x" + std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) throw std::invalid_argument("SymMatrix entries must be finite");
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  const double fro = entries.norm();
  if (asym > asymmetry_tol * fro) {
    throw std::invalid_argument("matrix asymmetry " + std::to_string(asym) + " exceeds " +
                                std::to_string(asymmetry_tol) + " * ||A||_F");
  }
  m_ = 0.5 * (entries + entries.transpose());
}

SymMatrix SymMatrix::identity(Index n) {
  if (n < 1) throw std::invalid_argument("SymMatrix::identity requires n >= 1");
  return SymMatrix(Matrix::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  if (d.size() < 1) throw std::invalid_argument("SymMatrix::diagonal requires a non-empty vector");
  if (!d.allFinite()) throw std::invalid_argument("SymMatrix entries must be finite");
  return SymMatrix(Matrix(d.asDiagonal()), Trusted{});
}

EigenDecomposition sym_eig(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NonConvergenceError(max_off_diagonal(a.matrix()));
  }
  return sorted_descending(solver.eigenvalues(), solver.eigenvectors());
}

Vector eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergenceError(max_off_diagonal(a.matrix()));
  return solver.eigenvalues().reverse();
}

EigenDecomposition jacobi_eig(const SymMatrix& a, const JacobiOptions& options) {
  const Index n = a.n();
  Matrix work = a.matrix();
  Matrix v = Matrix::Identity(n, n);
  const double threshold = options.relative_tolerance * work.norm();

  double residual = max_off_diagonal(work);
  int sweep = 0;
  while (residual > threshold) {
    if (sweep == options.max_sweeps) throw NonConvergenceError(residual);
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (work(p, q) == 0.0) continue;
        Eigen::JacobiRotation<double> rot;
        rot.makeJacobi(work, p, q);
        work.applyOnTheLeft(p, q, rot.adjoint());
        work.applyOnTheRight(p, q, rot);
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        v.applyOnTheRight(p, q, rot);
      }
    }
    ++sweep;
    residual = max_off_diagonal(work);
  }
  return sorted_descending(work.diagonal(), v);
}

EigenDecomposition psd_eig(const SymMatrix& a) {
  EigenDecomposition ed = sym_eig(a);
  const Index n = ed.values.size();
  const double lambda1 = ed.values(0);
  const double floor = -1e-10 * lambda1;
  if (ed.values(n - 1) < floor) throw NotPsdError(ed.values(n - 1), lambda1);
  for (Index j = 0; j < n; ++j) ed.values(j) = std::max(ed.values(j), 0.0);
  return ed;
}

SymMatrix psd_sqrt(const SymMatrix& a) {
  const EigenDecomposition ed = psd_eig(a);
  const Matrix half = ed.vectors * ed.values.cwiseSqrt().asDiagonal();
  return SymMatrix(Matrix(half * ed.vectors.transpose()));
}

double default_rank_tol(const Matrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * kMachineEpsilon;
}

Matrix pinv(const Matrix& m, std::optional<double> rank_tol) {
  if (!m.allFinite()) throw std::invalid_argument("pinv: non-finite input");
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  const double tol = rank_tol.value_or(default_rank_tol(m));
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SymPinv sym_pinv(const SymMatrix& a, std::optional<double> rank_tol) {
  const EigenDecomposition ed = sym_eig(a);
  const double tol = rank_tol.value_or(default_rank_tol(a.matrix()));
  const double scale = ed.values.cwiseAbs().maxCoeff();
  const double cutoff = tol * scale;

  SymPinv out;
  Vector inv = Vector::Zero(ed.values.size());
  for (Index j = 0; j < ed.values.size(); ++j) {
    if (std::abs(ed.values(j)) > cutoff) {
      inv(j) = 1.0 / ed.values(j);
      ++out.rank;
    }
  }
  out.inverse = ed.vectors * inv.asDiagonal() * ed.vectors.transpose();
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  return out;
}

Index numerical_rank(const Matrix& m, std::optional<double> rank_tol) {
  if (m.size() == 0) return 0;
  const double tol = rank_tol.value_or(default_rank_tol(m));
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return (s.array() > tol * s(0)).count();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (exactly_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NonConvergenceError(max_off_diagonal(m));
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_gram(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergenceError(std::nan(""));
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

SymMatrix projector(const Matrix& m, std::optional<double> rank_tol) {
  if (m.rows() == 0) throw std::invalid_argument("projector: matrix has no rows");
  if (!m.allFinite()) throw std::invalid_argument("projector: non-finite input");
  const Index n = m.rows();
  if (m.cols() == 0) return SymMatrix(Matrix::Zero(n, n));

  const double tol = rank_tol.value_or(default_rank_tol(m));
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const Index r = s(0) > 0.0 ? (s.array() > tol * s(0)).count() : 0;
  const auto basis = svd.matrixU().leftCols(r);
  return SymMatrix(Matrix(basis * basis.transpose()));
}

SpectralPartition partition(const EigenDecomposition& ed, Index k) {
  const Index n = ed.values.size();
  if (k < 1 || k > n) {
    throw std::invalid_argument("partition: k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  SpectralPartition p;
  p.u1 = ed.vectors.leftCols(k);
  p.u2 = ed.vectors.rightCols(n - k);
  p.sigma1 = ed.values.head(k);
  p.sigma2 = ed.values.tail(n - k);
  if (k < n) {
    const double scale = std::max(std::abs(ed.values(0)), std::numeric_limits<double>::min());
    p.degenerate = ed.values(k - 1) - ed.values(k) <= 1e-12 * scale;
  }
  return p;
}

double orthonormality_error(const Matrix& m) {
  if (m.cols() == 0) return 0.0;
  Matrix gram = Matrix::Zero(m.cols(), m.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  return spectral_norm(gram - Matrix::Identity(gram.rows(), gram.cols()));
}

}  // namespace nystrom
