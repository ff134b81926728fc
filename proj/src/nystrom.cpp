#include "nystrom/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nystrom {

NystromResult nystrom_extend(const SymMatrix& a, const ColumnSample& s, std::optional<double> rank_tol) {
  auto [c, w] = extract_cw(a, s);
  const EigenDecomposition wed = psd_eig(w);
  const double cutoff = rank_tol.value_or(default_rank_tol(w.matrix())) * wed.values(0);

  Index rank = 0;
  while (rank < wed.values.size() && wed.values(rank) > cutoff) ++rank;

  // C W^+ C^t = B B^t with B = C V_r diag(lambda_r)^(-1/2).
  const Matrix b = c * wed.vectors.leftCols(rank) * wed.values.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix ext = Matrix::Zero(a.n(), a.n());
  ext.selfadjointView<Eigen::Lower>().rankUpdate(b);
  ext = ext.selfadjointView<Eigen::Lower>();
  SymMatrix extension(ext);

  const double error = spectral_norm(a.matrix() - extension.matrix());
  const Vector lambdas = eigenvalues(extension);
  const double violation = std::min(lambdas(lambdas.size() - 1), 0.0);
  return NystromResult{s, std::move(extension), error, rank, violation};
}

double sqrt_projection_error(const SymMatrix& a, const ColumnSample& s, std::optional<double> rank_tol) {
  if (s.n() != a.n()) throw std::invalid_argument("sqrt_projection_error: sample and matrix dimensions differ");
  const SymMatrix root = psd_sqrt(a);
  const Matrix sampled = root.matrix()(Eigen::all, s.indices());
  const double w_tol = rank_tol.value_or(static_cast<double>(s.size()) * kMachineEpsilon);
  const SymMatrix p = projector(sampled, std::sqrt(w_tol));
  const Matrix residual = root.matrix() - p.matrix() * root.matrix();
  const double norm = spectral_norm(residual);
  return norm * norm;
}

}  // namespace nystrom
