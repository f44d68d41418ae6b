#include "tncirc/svd.hpp"

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace tncirc;

namespace {

void expect_isometries(const SvdResult& r) {
  const Index k = r.s.size();
  EXPECT_LT((r.u.adjoint() * r.u - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((r.vh * r.vh.adjoint() - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-12);
}

double reconstruction_error_sq(const Matrix& m, const SvdResult& r) {
  const Matrix rec = r.u * r.s.cast<Complex>().asDiagonal() * r.vh;
  return (m - rec).squaredNorm() / m.squaredNorm();
}

}  // namespace

TEST(TruncatedSvd, IdentityKeepsAllValues) {
  const SvdResult r = truncated_svd(Matrix::Identity(4, 4), 0.0, 100);
  ASSERT_EQ(r.s.size(), 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(r.s[i], 1.0, 1e-14);
  EXPECT_EQ(r.truncation_error, 0.0);
  expect_isometries(r);
}

TEST(TruncatedSvd, RankOneOuterProduct) {
  Vector u = tncirc::testing::random_matrix(6, 1, 3).col(0).normalized();
  Vector v = tncirc::testing::random_matrix(5, 1, 4).col(0).normalized();
  const Matrix m = u * v.adjoint();
  const SvdResult r = truncated_svd(m, 1e-12, 100);
  ASSERT_EQ(r.s.size(), 1);
  EXPECT_NEAR(r.s[0], 1.0, 1e-12);
  EXPECT_LT(r.truncation_error, 1e-24);
  EXPECT_LT(reconstruction_error_sq(m, r), 1e-24);
}

TEST(TruncatedSvd, MaxRankTruncationErrorMatchesSpectralTail) {
  const Matrix m = tncirc::testing::random_matrix(8, 8, 11);
  const SvdResult r = truncated_svd(m, 0.0, 4);
  ASSERT_EQ(r.s.size(), 4);

  // Independent oracle: full singular spectrum from the eigenvalues of m^H m.
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
  RealVector evals = es.eigenvalues();  // ascending
  double tail = 0.0;
  for (Index i = 0; i < 4; ++i) tail += evals[i];
  const double expected = tail / evals.sum();
  EXPECT_NEAR(r.truncation_error, expected, 1e-12);

  // The reconstruction bound from the contract.
  EXPECT_LE(reconstruction_error_sq(m, r), r.truncation_error + 1e-12);
}

TEST(TruncatedSvd, ReconstructionBoundHoldsOnRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix m = tncirc::testing::random_matrix(9, 7, 100 + seed);
    for (double cutoff : {0.0, 1e-6, 1e-2}) {
      const SvdResult r = truncated_svd(m, cutoff, 9);
      EXPECT_LE(reconstruction_error_sq(m, r), r.truncation_error + 1e-12);
      expect_isometries(r);
      for (Index i = 1; i < r.s.size(); ++i) EXPECT_GE(r.s[i - 1], r.s[i]);
    }
  }
}

TEST(TruncatedSvd, DegenerateGroupAtBoundaryIsKeptWhole) {
  // Singular values {1, 1, 1, 1e-9}: each of the triple carries weight
  // fraction 1/3 < cutoff, so the plain rule would keep a single value; the
  // degenerate-group rule extends through the whole triple.
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal() << 1.0, 1.0, 1.0, 1e-9;
  const SvdResult r = truncated_svd(m, 0.34, 100);
  EXPECT_EQ(r.s.size(), 3);

  // The hard cap still wins over the group rule.
  const SvdResult capped = truncated_svd(m, 0.34, 2);
  EXPECT_EQ(capped.s.size(), 2);
}

TEST(TruncatedSvd, RejectsBadInput) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(truncated_svd(m, -1.0, 2), std::invalid_argument);
  EXPECT_THROW(truncated_svd(m, 0.0, 0), std::invalid_argument);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(truncated_svd(m, 0.0, 2), std::invalid_argument);
}
