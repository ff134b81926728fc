#pragma once

#include <optional>

#include "nystrom/matcore.hpp"
#include "nystrom/sampling.hpp"

namespace nystrom {

struct NystromResult {
  ColumnSample sample;
  SymMatrix extension;    // C W^+ C^t
  double spectral_error;  // ||A - extension||_2
  Index rank_w;           // numerical rank of W under the pinv cutoff
  double psd_violation;   // min(lambda_min(extension), 0); reported, never clamped away
};

/// Nystrom extension of A from the sampled columns. W^+ comes from the
/// eigendecomposition of W with the default rank cutoff (overridable).
/// Throws NotPsdError when W is not PSD within tolerance.
NystromResult nystrom_extend(const SymMatrix& a, const ColumnSample& s,
                             std::optional<double> rank_tol = std::nullopt);

/// ||(I - P_{A^{1/2} S}) A^{1/2}||_2^2, the column-selection form of the
/// Nystrom error. The projector keeps singular values of A^{1/2} S above
/// sqrt(rank_tol) * sigma_max, the same rank decision nystrom_extend makes on
/// W. Throws NotPsdError for indefinite A.
double sqrt_projection_error(const SymMatrix& a, const ColumnSample& s,
                             std::optional<double> rank_tol = std::nullopt);

}  // namespace nystrom
