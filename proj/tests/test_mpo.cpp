#include "tncirc/mpo.hpp"

#include <random>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "tncirc/contraction.hpp"

using namespace tncirc;
using tncirc::testing::dense_operator;
using tncirc::testing::dense_state;
using tncirc::testing::random_bundled_mps;
using tncirc::testing::random_hermitian;
using tncirc::testing::random_matrix;

namespace {

double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// Sum Hamiltonian assembled directly for comparison.
Matrix dense_sum(const std::vector<Matrix>& site_terms, const std::vector<Matrix>& ops,
                 const RealMatrix& g, const std::vector<OperatorString>& strings) {
  const int n = static_cast<int>(site_terms.size());
  std::vector<Index> dims;
  Index total = 1;
  for (const auto& h : site_terms) {
    dims.push_back(h.rows());
    total *= h.rows();
  }
  auto embed = [&](const Matrix& op, int site) {
    Matrix out = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      const Matrix f = i == site ? op : Matrix(Matrix::Identity(dims[static_cast<std::size_t>(i)],
                                                                dims[static_cast<std::size_t>(i)]));
      Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
      for (Index a = 0; a < f.rows(); ++a) {
        for (Index b = 0; b < f.cols(); ++b) {
          next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = f(a, b) * out;
        }
      }
      out = next;
    }
    return out;
  };
  Matrix h = Matrix::Zero(total, total);
  for (int i = 0; i < n; ++i) h += embed(site_terms[static_cast<std::size_t>(i)], i);
  if (g.size() > 0) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (g(i, j) != 0.0) {
          h += g(i, j) * embed(ops[static_cast<std::size_t>(i)], i) *
               embed(ops[static_cast<std::size_t>(j)], j);
        }
      }
    }
  }
  for (const auto& s : strings) {
    Matrix acc = Matrix::Identity(total, total);
    for (int i = 0; i < n; ++i) acc = acc * embed(s.ops[static_cast<std::size_t>(i)], i);
    h += s.coeff * acc;
  }
  return h;
}

}  // namespace

TEST(Mpo, IdentityCompressesToBondOne) {
  Mpo id = identity_mpo({3, 3, 3, 3});
  EXPECT_LT(relative_error(dense_operator(id), Matrix::Identity(81, 81)), 1e-14);
  const Mpo c = mpo_compress(id, 1e-12);
  for (int l = 0; l + 1 < 4; ++l) EXPECT_EQ(c.bond_dim(l), 1);
  EXPECT_LT(relative_error(dense_operator(c), Matrix::Identity(81, 81)), 1e-12);
}

TEST(Mpo, SumBuilderMatchesDenseOracle) {
  const int n = 4;
  const Index d = 3;
  std::vector<Matrix> site_terms, ops;
  for (int i = 0; i < n; ++i) {
    site_terms.push_back(random_hermitian(d, 100 + i));
    ops.push_back(random_hermitian(d, 200 + i));
  }
  RealMatrix g = RealMatrix::Zero(n, n);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g(i, j) = uni(rng);
      g(j, i) = g(i, j);
    }
  }
  std::vector<OperatorString> strings(2);
  strings[0].coeff = Complex(0.3, 0.4);
  strings[1].coeff = Complex(0.3, -0.4);
  for (int i = 0; i < n; ++i) {
    const Matrix u = random_matrix(d, d, 300 + i);
    strings[0].ops.push_back(u);
    strings[1].ops.push_back(u.adjoint());
  }

  const Mpo mpo = build_sum_mpo(site_terms, ops, g, strings);
  const Matrix want = dense_sum(site_terms, ops, g, strings);
  EXPECT_LT(relative_error(dense_operator(mpo), want), 1e-12);

  const Mpo compressed = mpo_compress(mpo, 1e-14);
  EXPECT_LT(relative_error(dense_operator(compressed), want), 1e-12);
  for (int l = 0; l + 1 < n; ++l) EXPECT_LE(compressed.bond_dim(l), mpo.bond_dim(l));
}

TEST(Mpo, NearestNeighbourCouplingCompressesToBondThree) {
  const int n = 6;
  const Index d = 2;
  std::vector<Matrix> site_terms(n, Matrix::Zero(d, d));
  std::vector<Matrix> ops;
  for (int i = 0; i < n; ++i) ops.push_back(random_hermitian(d, 400 + i));
  RealMatrix g = RealMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g(i, i + 1) = 0.5 + 0.1 * i;
    g(i + 1, i) = g(i, i + 1);
  }
  const Mpo mpo = mpo_compress(build_sum_mpo(site_terms, ops, g), 1e-13);
  for (int l = 0; l + 1 < n; ++l) EXPECT_LE(mpo.bond_dim(l), 3);
  EXPECT_LT(relative_error(dense_operator(mpo), dense_sum(site_terms, ops, g, {})), 1e-11);
}

TEST(Mpo, AllToAllCouplingReconstructsThroughCompression) {
  const int n = 8;
  const Index d = 2;
  std::vector<Matrix> site_terms(n, Matrix::Zero(d, d));
  std::vector<Matrix> ops;
  for (int i = 0; i < n; ++i) ops.push_back(random_hermitian(d, 500 + i));
  RealMatrix g = RealMatrix::Zero(n, n);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g(i, j) = uni(rng);
      g(j, i) = g(i, j);
    }
  }
  const Mpo mpo = mpo_compress(build_sum_mpo(site_terms, ops, g), 1e-12);
  EXPECT_LT(relative_error(dense_operator(mpo), dense_sum(site_terms, ops, g, {})), 1e-10);
}

TEST(Mpo, CompressionErrorTracksCutoff) {
  // Built-then-compressed MPOs reconstruct within 10x the cutoff on <= 5 sites.
  const int n = 5;
  const Index d = 2;
  std::vector<Matrix> site_terms, ops;
  for (int i = 0; i < n; ++i) {
    site_terms.push_back(random_hermitian(d, 600 + i));
    ops.push_back(random_hermitian(d, 700 + i));
  }
  RealMatrix g = RealMatrix::Constant(n, n, 0.25);
  const Matrix want = dense_sum(site_terms, ops, g, {});
  for (double cutoff : {1e-12, 1e-8}) {
    const Mpo mpo = mpo_compress(build_sum_mpo(site_terms, ops, g), cutoff);
    EXPECT_LE(relative_error(dense_operator(mpo), want), 10 * cutoff + 1e-13);
  }
}

TEST(Mpo, ProductStringsCompressToBondTwo) {
  const int n = 5;
  const Index d = 3;
  std::vector<Matrix> site_terms(n, Matrix::Zero(d, d));
  std::vector<OperatorString> strings(2);
  strings[0].coeff = Complex(0.0, 1.0);
  strings[1].coeff = Complex(0.0, -1.0);
  for (int i = 0; i < n; ++i) {
    const Matrix u = random_matrix(d, d, 800 + i);
    strings[0].ops.push_back(u);
    strings[1].ops.push_back(u.adjoint());
  }
  const Mpo mpo = mpo_compress(build_sum_mpo(site_terms, {}, RealMatrix(), strings), 1e-13);
  for (int l = 0; l + 1 < n; ++l) EXPECT_LE(mpo.bond_dim(l), 2);
}

TEST(Mpo, AdditionIsDenseSum) {
  const std::vector<Index> dims{2, 3, 2};
  Mpo a = single_site_mpo(dims, random_hermitian(2, 31), 0);
  Mpo b = single_site_mpo(dims, random_hermitian(3, 32), 1);
  a.energy_offset = 1.5;
  b.energy_offset = -0.25;
  const Mpo sum = mpo_add(a, b);
  EXPECT_LT(relative_error(dense_operator(sum), dense_operator(a) + dense_operator(b)), 1e-13);
  EXPECT_DOUBLE_EQ(sum.energy_offset, 1.25);
}

TEST(Contraction, MatrixElementIdentityAndOrthogonality) {
  const BundledMps s = random_bundled_mps({3, 3, 3, 3}, 4, 3, 47);
  const Mpo id = identity_mpo({3, 3, 3, 3});
  const Matrix g = mpo_matrix_elements(s, id, s);
  EXPECT_LT((g - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(std::abs(matrix_element(s, 0, id, s, 0)), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(matrix_element(s, 0, id, s, 1)), 0.0, 1e-10);
}

TEST(Contraction, MatrixElementMatchesDenseOracle) {
  const std::vector<Index> dims{2, 3, 2, 3};
  const BundledMps bra = random_bundled_mps(dims, 4, 2, 53);
  const BundledMps ket = random_bundled_mps(dims, 3, 2, 59);
  std::vector<Matrix> site_terms;
  std::vector<Matrix> ops;
  for (Index d : dims) {
    site_terms.push_back(random_hermitian(d, 900 + d));
    ops.push_back(random_hermitian(d, 950 + d));
  }
  RealMatrix g = RealMatrix::Constant(4, 4, 0.3);
  const Mpo mpo = build_sum_mpo(site_terms, ops, g);
  const Matrix dense = dense_sum(site_terms, ops, g, {});

  const Matrix got = mpo_matrix_elements(bra, mpo, ket);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Complex want = dense_state(bra, i).dot(dense * dense_state(ket, j));
      EXPECT_LT(std::abs(got(i, j) - want), 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Contraction, LocalExpectationAgainstDenseAndMpoRoutes) {
  const std::vector<Index> dims{3, 3, 3};
  const BundledMps s = random_bundled_mps(dims, 3, 2, 61);
  const Matrix op = random_hermitian(3, 1001);

  // Identity operator gives 1.
  EXPECT_NEAR(local_expectation(s, Matrix::Identity(3, 3), 1, 0).real(), 1.0, 1e-10);

  // Dense oracle at every site and member.
  for (int site = 0; site < 3; ++site) {
    for (int member = 0; member < 2; ++member) {
      const Vector v = dense_state(s, member);
      const Vector w = tncirc::testing::dense_apply_site_op(v, op, site, dims);
      const Complex want = v.dot(w);
      EXPECT_LT(std::abs(local_expectation(s, op, site, member) - want), 1e-10);
    }
  }

  // Batched route agrees.
  const Matrix batched = site_expectations(s, {op, op, op});
  for (int site = 0; site < 3; ++site) {
    for (int member = 0; member < 2; ++member) {
      EXPECT_LT(std::abs(batched(member, site) - local_expectation(s, op, site, member)), 1e-10);
    }
  }
}

TEST(Contraction, ProductStateLocalExpectationIsQuadraticForm) {
  Vector v0 = Vector::Zero(3);
  v0[1] = 1.0;
  std::vector<Vector> vs{v0, v0.reverse(), v0};
  const BundledMps s = BundledMps::from_product_states({vs});
  const Matrix op = random_hermitian(3, 1101);
  const Complex want = vs[1].dot(op * vs[1]);
  EXPECT_LT(std::abs(local_expectation(s, op, 1, 0) - want), 1e-12);
}

TEST(Contraction, TwoSiteOperatorMatchesDenseAction) {
  const std::vector<Index> dims{2, 3, 3, 2};
  std::vector<Matrix> site_terms, ops;
  for (Index d : dims) {
    site_terms.push_back(random_hermitian(d, 1200 + d));
    ops.push_back(random_hermitian(d, 1250 + d));
  }
  RealMatrix g = RealMatrix::Constant(4, 4, -0.4);
  const Mpo mpo = build_sum_mpo(site_terms, ops, g);
  const BundledMps s = canonicalize(random_bundled_mps(dims, 4, 2, 67), 1);

  // Environments around sites (1, 2).
  DenseTensor le = make_boundary_env();
  le = update_left_env(le, s.site(0), mpo.site(0), s.site(0));
  DenseTensor re = make_boundary_env();
  re = update_right_env(re, s.site(3), mpo.site(3), s.site(3));

  TwoSiteOperator op(le, mpo.site(1), mpo.site(2), re);
  const Index dim = op.dimension();
  Matrix in = random_matrix(dim, 2, 71);
  Matrix out;
  op.apply(in, out);

  // Dense check: H_eff = (L x W1 x W2 x R) evaluated through the dense MPO on
  // the full chain with the boundary sites projected onto the gauge tensors.
  const Matrix h_dense = dense_operator(mpo);
  const Matrix a0 = Eigen::Map<const Matrix>(s.site(0).data().data(), 2, s.site(0).dim(2));
  const Matrix b3 =
      Eigen::Map<const Matrix>(s.site(3).data().data(), s.site(3).dim(0), 2).transpose();
  const Index chi_l = a0.cols(), chi_r = b3.cols();
  // Basis of the two-site problem: |l> x |s1 s2> x |r> embedded in the chain.
  Matrix basis = Matrix::Zero(h_dense.rows(), dim);
  for (Index l = 0; l < chi_l; ++l) {
    for (Index s1 = 0; s1 < 3; ++s1) {
      for (Index s2 = 0; s2 < 3; ++s2) {
        for (Index r = 0; r < chi_r; ++r) {
          const Index col = l + chi_l * (s1 + 3 * (s2 + 3 * r));
          for (Index p0 = 0; p0 < 2; ++p0) {
            for (Index p3 = 0; p3 < 2; ++p3) {
              basis(p0 + 2 * (s1 + 3 * (s2 + 3 * p3)), col) += a0(p0, l) * b3(p3, r);
            }
          }
        }
      }
    }
  }
  const Matrix h_eff = basis.adjoint() * h_dense * basis;
  EXPECT_LT((out - h_eff * in).norm() / out.norm(), 1e-10);
}
