#include "tncirc/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace tncirc;

namespace {

BlockOperator matrix_operator(const Matrix& h) {
  return [h](const Matrix& in, Matrix& out) { out.noalias() = h * in; };
}

Matrix seeded_block(Index n, Index k, std::uint64_t seed) {
  return tncirc::testing::random_matrix(n, k, seed);
}

}  // namespace

TEST(BlockLanczos, DiagonalOperator) {
  Matrix h = Matrix::Zero(10, 10);
  for (Index i = 0; i < 10; ++i) h(i, i) = double(i + 1);
  const LanczosResult r = block_lanczos(matrix_operator(h), seeded_block(10, 3, 1), 3);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[0], 1.0, 1e-10);
  EXPECT_NEAR(r.values[1], 2.0, 1e-10);
  EXPECT_NEAR(r.values[2], 3.0, 1e-10);
}

TEST(BlockLanczos, PauliXSpectrum) {
  Matrix h(2, 2);
  h << 0, 1, 1, 0;
  const LanczosResult r = block_lanczos(matrix_operator(h), seeded_block(2, 2, 2), 2);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[0], -1.0, 1e-12);
  EXPECT_NEAR(r.values[1], 1.0, 1e-12);
}

TEST(BlockLanczos, MatchesDenseSolverOnRandomHermitian) {
  const Matrix h = tncirc::testing::random_hermitian(50, 42);
  LanczosOptions opts;
  opts.tol = 1e-10;
  const LanczosResult r = block_lanczos(matrix_operator(h), seeded_block(50, 5, 3), 5, opts);
  ASSERT_TRUE(r.converged);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(r.values[i], es.eigenvalues()[i], 1e-9);
  // Orthonormal eigenvectors with the promised residuals.
  EXPECT_LT((r.vectors.adjoint() * r.vectors - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(),
            1e-12);
  for (Index i = 0; i < 5; ++i) {
    const double res = (h * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
    EXPECT_LE(res, 10 * opts.tol * std::max(1.0, std::abs(r.values[i])));
  }
}

TEST(BlockLanczos, PropertyLowestSpectrumSmallMatrices) {
  LanczosOptions opts;
  opts.tol = 1e-11;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Index n = 17 + static_cast<Index>(seed) * 15;  // up to 62
    const Index k = 2 + static_cast<Index>(seed % 3) * 3;  // 2, 5, 8
    const Matrix h = tncirc::testing::random_hermitian(n, 1000 + seed);
    const LanczosResult r =
        block_lanczos(matrix_operator(h), seeded_block(n, k, 17 + seed), k, opts);
    ASSERT_TRUE(r.converged);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (Index i = 0; i < k; ++i) {
      EXPECT_NEAR(r.values[i], es.eigenvalues()[i], 10 * opts.tol * std::max(1.0, std::abs(r.values[i])));
    }
  }
}

TEST(BlockLanczos, DeterministicForFixedSeed) {
  const Matrix h = tncirc::testing::random_hermitian(30, 5);
  LanczosOptions opts;
  opts.seed = 777;
  const Matrix v0 = seeded_block(30, 4, 9);
  const LanczosResult a = block_lanczos(matrix_operator(h), v0, 4, opts);
  const LanczosResult b = block_lanczos(matrix_operator(h), v0, 4, opts);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (Index i = 0; i < a.values.size(); ++i) {
    EXPECT_EQ(a.values[i], b.values[i]);  // bitwise
  }
}

TEST(BlockLanczos, DeflatedBlockIsReseeded) {
  Matrix h = Matrix::Zero(12, 12);
  for (Index i = 0; i < 12; ++i) h(i, i) = double(i);
  Matrix v0(12, 3);
  v0.col(0) = seeded_block(12, 1, 21).col(0);
  v0.col(1) = v0.col(0);  // linearly dependent
  v0.col(2) = 2.0 * v0.col(0);
  const LanczosResult r = block_lanczos(matrix_operator(h), v0, 3, {});
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[0], 0.0, 1e-10);
  EXPECT_NEAR(r.values[1], 1.0, 1e-10);
  EXPECT_NEAR(r.values[2], 2.0, 1e-10);
}

TEST(BlockLanczos, NonConvergedFlagOnIterationBudget) {
  const Matrix h = tncirc::testing::random_hermitian(64, 91);
  LanczosOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  const LanczosResult r = block_lanczos(matrix_operator(h), seeded_block(64, 2, 5), 2, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.values.size(), 2);
}

TEST(BlockLanczos, RejectsNonHermitianOperator) {
  Matrix h = tncirc::testing::random_matrix(8, 8, 51);  // generic, not Hermitian
  EXPECT_THROW(block_lanczos(matrix_operator(h), seeded_block(8, 2, 6), 2, {}),
               std::invalid_argument);
}

TEST(BlockLanczos, BoundedBasisRestartStillConverges) {
  const Matrix h = tncirc::testing::random_hermitian(200, 33);
  LanczosOptions opts;
  opts.tol = 1e-10;
  opts.max_basis = 18;  // forces thick restarts
  opts.max_iter = 400;
  const LanczosResult r = block_lanczos(matrix_operator(h), seeded_block(200, 3, 8), 3, opts);
  ASSERT_TRUE(r.converged);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(r.values[i], es.eigenvalues()[i], 1e-8);
}
