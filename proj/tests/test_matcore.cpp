#include <array>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nystrom/errors.hpp"
#include "nystrom/matcore.hpp"
#include "support.hpp"

using namespace nystrom;
using testing::gaussian;
using testing::random_psd;
using testing::random_symmetric;

namespace {

double reconstruction_residual(const SymMatrix& a, const EigenDecomposition& ed) {
  const Matrix rebuilt = ed.vectors * ed.values.asDiagonal() * ed.vectors.transpose();
  return testing::power_iteration_norm(rebuilt - a.matrix()) / testing::power_iteration_norm(a.matrix());
}

void check_penrose(const Matrix& m, const Matrix& mp, double tol) {
  const double scale = std::max(1.0, testing::fro(m)) * std::max(1.0, testing::fro(mp));
  CHECK(testing::fro(m * mp * m - m) <= tol * scale);
  CHECK(testing::fro(mp * m * mp - mp) <= tol * scale);
  const Matrix left = m * mp;
  const Matrix right = mp * m;
  CHECK(testing::fro(left - left.transpose()) <= tol * scale);
  CHECK(testing::fro(right - right.transpose()) <= tol * scale);
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes and rejects bad input") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0 + 1e-12, 3.0;
  const SymMatrix a(m);
  CHECK(a(0, 1) == a(1, 0));

  Matrix skew(2, 2);
  skew << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(SymMatrix{skew}, std::invalid_argument);
  CHECK_THROWS_AS(SymMatrix{Matrix(2, 3)}, std::invalid_argument);
  CHECK_THROWS_AS(SymMatrix{Matrix(0, 0)}, std::invalid_argument);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(SymMatrix{nan}, std::invalid_argument);
}

TEST_CASE("sym_eig on diagonal and analytic 2x2 input") {
  const EigenDecomposition d = sym_eig(SymMatrix::diagonal(Vector::Map(std::array{3.0, 1.0, 2.0}.data(), 3)));
  CHECK(d.values(0) == doctest::Approx(3.0));
  CHECK(d.values(1) == doctest::Approx(2.0));
  CHECK(d.values(2) == doctest::Approx(1.0));
  // eigenvectors are signed identity columns 0, 2, 1
  CHECK(std::abs(d.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(1, 2)) == doctest::Approx(1.0));

  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  const EigenDecomposition ed = sym_eig(SymMatrix(m));
  CHECK(ed.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ed.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(ed.vectors(0, 0)) == doctest::Approx(r));
  CHECK(ed.vectors(0, 0) * ed.vectors(1, 0) > 0.0);  // +-(1,1)
  CHECK(ed.vectors(0, 1) * ed.vectors(1, 1) < 0.0);  // +-(1,-1)
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 11);
    const SymMatrix a(random_symmetric(n, seed));
    const EigenDecomposition ed = sym_eig(a);
    for (Index j = 1; j < n; ++j) CHECK(ed.values(j - 1) >= ed.values(j));
    CHECK(testing::power_iteration_norm(ed.vectors.transpose() * ed.vectors - Matrix::Identity(n, n)) < 1e-10);
    CHECK(reconstruction_residual(a, ed) < 1e-10);
  }
}

TEST_CASE("jacobi_eig agrees with sym_eig") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index n = 3 + static_cast<Index>(seed);
    const SymMatrix a(random_symmetric(n, 100 + seed));
    const EigenDecomposition qr = sym_eig(a);
    const EigenDecomposition jac = jacobi_eig(a);
    CHECK((qr.values - jac.values).cwiseAbs().maxCoeff() < 1e-10 * qr.values.cwiseAbs().maxCoeff());
    CHECK(reconstruction_residual(a, jac) < 1e-10);
    CHECK(orthonormality_error(jac.vectors) < 1e-10);
  }
}

TEST_CASE("jacobi_eig reports non-convergence with the residual") {
  const SymMatrix a(random_symmetric(12, 7));
  try {
    jacobi_eig(a, JacobiOptions{1e-30, 1});
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(e.exit_code() == ExitCode::numerical);
  }
}

TEST_CASE("eigen ordering keeps ties deterministic") {
  const SymMatrix a = SymMatrix::identity(4);
  const EigenDecomposition first = sym_eig(a);
  const EigenDecomposition second = sym_eig(a);
  CHECK(first.vectors == second.vectors);
  CHECK(partition(first, 2).degenerate);
}

TEST_CASE("psd_sqrt") {
  Vector d(2);
  d << 4.0, 9.0;
  const SymMatrix root = psd_sqrt(SymMatrix::diagonal(d));
  CHECK(root(0, 0) == doctest::Approx(2.0));
  CHECK(root(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(root(0, 1)) < 1e-15);

  const SymMatrix eye = psd_sqrt(SymMatrix::identity(5));
  CHECK((eye.matrix() - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);

  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 9);
    const SymMatrix a(random_psd(n, 1 + static_cast<Index>(seed % static_cast<std::uint64_t>(n)), seed));
    const SymMatrix r = psd_sqrt(a);
    const double lambda1 = testing::power_iteration_norm(a.matrix());
    CHECK(testing::power_iteration_norm(r.matrix() * r.matrix() - a.matrix()) <= 1e-9 * lambda1);
    CHECK(eigenvalues(r)(n - 1) >= -1e-12 * std::sqrt(lambda1));
  }
}

TEST_CASE("psd_sqrt clamps round-off but rejects indefinite input") {
  Vector d(3);
  d << 1.0, 0.0, -1e-12;
  CHECK_NOTHROW(psd_sqrt(SymMatrix::diagonal(d)));

  Matrix flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  try {
    psd_sqrt(SymMatrix(flip));
    FAIL("expected NotPsdError");
  } catch (const NotPsdError& e) {
    CHECK(e.eigenvalue() == doctest::Approx(-1.0));
  }
}

TEST_CASE("psd_eig of a PSD matrix never reports eigenvalues below -1e-10 lambda1") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index n = 3 + static_cast<Index>(seed % 10);
    const SymMatrix a(random_psd(n, 1 + static_cast<Index>(seed % 3), seed));
    const Vector lambdas = eigenvalues(a);
    CHECK(lambdas(n - 1) >= -1e-10 * lambdas(0));
  }
}

TEST_CASE("pinv on simple inputs") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix dp = pinv(d);
  CHECK(dp(0, 0) == doctest::Approx(0.5));
  CHECK(dp(1, 1) == 0.0);
  CHECK((pinv(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(pinv(Matrix::Zero(3, 2)).isZero());
  CHECK(pinv(Matrix(0, 3)).rows() == 3);
}

TEST_CASE("pinv satisfies the Penrose conditions on random matrices") {
  // rank-deficient 5x3 (rank 2)
  const Matrix low = gaussian(5, 2, 11) * gaussian(2, 3, 12);
  CHECK(numerical_rank(low) == 2);
  check_penrose(low, pinv(low), 1e-8);

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    nystrom::Rng rng({seed, 5});
    const auto rows = 1 + static_cast<Index>(rng.uniform_below(12));
    const auto cols = 1 + static_cast<Index>(rng.uniform_below(12));
    const auto rank = 1 + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(std::min(rows, cols))));
    const Matrix m = gaussian(rows, rank, seed) * gaussian(rank, cols, seed + 1000);
    check_penrose(m, pinv(m), 1e-8);
  }
}

TEST_CASE("sym_pinv matches pinv for symmetric matrices") {
  const SymMatrix a(random_psd(7, 3, 42));
  const SymPinv sp = sym_pinv(a);
  CHECK(sp.rank == 3);
  CHECK(testing::fro(sp.inverse - pinv(a.matrix())) < 1e-8 * testing::fro(sp.inverse));
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Vector d(2);
  d << -5.0, 2.0;
  CHECK(spectral_norm(Matrix(d.asDiagonal())) == doctest::Approx(5.0));
  CHECK(spectral_norm(Matrix(0, 4)) == 0.0);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix m = gaussian(6, 4, seed);
    CHECK(testing::rel_diff(spectral_norm(m), testing::power_iteration_norm(m)) < 1e-8);
    CHECK(testing::rel_diff(spectral_norm(m.transpose()), testing::power_iteration_norm(m)) < 1e-8);
  }
}

TEST_CASE("||M M^t||_2 equals ||M||_2^2") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix m = gaussian(3 + static_cast<Index>(seed % 5), 2 + static_cast<Index>(seed % 7), seed);
    const double norm = spectral_norm(m);
    CHECK(testing::rel_diff(spectral_norm(m * m.transpose()), norm * norm) < 1e-9);
  }
}

TEST_CASE("projector") {
  const SymMatrix p = projector(Matrix::Identity(3, 3).leftCols(1));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((p.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);

  const Matrix invertible = gaussian(4, 4, 3);
  CHECK((projector(invertible).matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix m = gaussian(7, 3, seed);
    const Matrix pm = projector(m).matrix();
    CHECK(testing::power_iteration_norm(pm * pm - pm) < 1e-9);
    CHECK(testing::power_iteration_norm(pm * m - m) < 1e-9 * testing::power_iteration_norm(m));
    CHECK(std::abs(spectral_norm(pm) - 1.0) < 1e-9);
  }
  CHECK(spectral_norm(projector(Matrix::Zero(4, 2)).matrix()) == 0.0);
}

TEST_CASE("partition") {
  const EigenDecomposition full = sym_eig(SymMatrix::identity(3));
  const SpectralPartition all = partition(full, 3);
  CHECK(all.u2.cols() == 0);
  CHECK(all.sigma2.size() == 0);
  CHECK(all.lambda_next() == 0.0);

  Vector d(3);
  d << 3.0, 2.0, 1.0;
  const SpectralPartition p = partition(sym_eig(SymMatrix::diagonal(d)), 1);
  CHECK(p.sigma1.size() == 1);
  CHECK(p.sigma1(0) == doctest::Approx(3.0));
  CHECK(p.sigma2(0) == doctest::Approx(2.0));
  CHECK(p.sigma2(1) == doctest::Approx(1.0));
  CHECK_FALSE(p.degenerate);

  const SpectralPartition r = partition(sym_eig(SymMatrix(random_psd(8, 8, 9))), 3);
  CHECK(r.sigma1.minCoeff() >= r.sigma2.maxCoeff());
  Matrix joined(8, 8);
  joined << r.u1, r.u2;
  CHECK(orthonormality_error(joined) < 1e-10);

  CHECK_THROWS_AS(partition(full, 0), std::invalid_argument);
  CHECK_THROWS_AS(partition(full, 4), std::invalid_argument);
}
