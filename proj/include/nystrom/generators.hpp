#pragma once

// Synthetic PSD matrices with a planted spectrum and planted coherence.

#include <string>
#include <vector>

#include "nystrom/matcore.hpp"
#include "nystrom/rng.hpp"

namespace nystrom {

struct SpectrumSpec {
  enum class Kind { exact_rank, exponential, power_law, custom };

  Kind kind = Kind::exponential;
  Index n = 0;
  Index k = 1;
  double lambda1 = 1.0;
  double parameter = 0.5;      // decay rate r (exponential) or exponent alpha (power law)
  std::vector<double> custom;  // full spectrum for Kind::custom

  /// Parses "exact", "exp:<rate>", "power:<alpha>" or "custom:<l1>,<l2>,...".
  /// Throws std::invalid_argument on malformed text.
  static SpectrumSpec parse(const std::string& text, Index n, Index k, double lambda1 = 1.0);
  std::string to_string() const;
};

/// The planted eigenvalues, length n, non-increasing and non-negative:
///   exact_rank:  lambda1 * (k - j) / k for j < k, then zeros
///   exponential: lambda1 * r^j
///   power_law:   lambda1 * (j + 1)^-alpha
/// (j is 0-based). Throws std::invalid_argument for inconsistent specs.
Vector spectrum_values(const SpectrumSpec& spec);

struct CoherencePlan {
  enum class Kind {
    low,     // Haar-random eigenbasis
    spiked,  // `spikes` standard basis vectors planted in U1; coherence n/k
    flat,    // U1 spans k Hadamard columns; coherence exactly 1 (n a power of two)
  };

  Kind kind = Kind::low;
  Index spikes = 0;

  /// Parses "low", "spiked:<m>" or "flat".
  static CoherencePlan parse(const std::string& text);
  std::string to_string() const;
};

/// Haar-distributed n x k matrix with orthonormal columns: QR of an i.i.d.
/// standard normal matrix with the signs of diag(R) made positive.
Matrix random_orthonormal(Index n, Index k, const RngSeed& seed);

/// U diag(lambdas) U^t for square orthogonal U. Throws std::invalid_argument
/// for an unsorted or negative spectrum or a non-orthogonal U.
SymMatrix psd_from_spectrum(const Matrix& u, const Vector& lambdas);

struct PlantedInstance {
  SymMatrix a;
  SpectralPartition partition;  // the planted eigenbasis split at k
  double tau;                   // coherence of the planted U1
};

/// Spiked plans require 1 <= spikes <= k; flat requires n to be a power of two.
PlantedInstance planted_instance(const SpectrumSpec& spec, const CoherencePlan& plan, const RngSeed& seed);

}  // namespace nystrom
