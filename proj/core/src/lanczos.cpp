#include "tncirc/lanczos.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tncirc {

namespace {

void fill_random(Eigen::Ref<Vector> v, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 0; i < v.size(); ++i) v[i] = Complex(gauss(rng), gauss(rng));
}

// Orthonormalize the columns of w against the first `basis_cols` columns of
// `basis` and among themselves. The basis projection runs blocked (one GEMM
// pass; callers have already projected once); the mutual orthogonalization is
// modified Gram-Schmidt with two passes. Columns that deflate are replaced by
// seeded random vectors orthogonal to everything kept so far; their
// coefficient rows in r are zero.
Matrix orthonormalize(Matrix& w, const Matrix& basis, Index basis_cols, std::mt19937_64& rng,
                      double drop_tol) {
  const Index kb = w.cols();
  if (basis_cols > 0) {
    w.noalias() -= basis.leftCols(basis_cols) * (basis.leftCols(basis_cols).adjoint() * w);
  }
  Matrix r = Matrix::Zero(kb, kb);
  for (Index j = 0; j < kb; ++j) {
    auto col = w.col(j);
    const double scale = std::max(col.norm(), 1e-300);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i < j; ++i) {
          const Complex proj = w.col(i).dot(col);
          if (attempt == 0) r(i, j) += proj;
          col -= proj * w.col(i);
        }
      }
      const double nrm = col.norm();
      if (nrm > drop_tol * scale && nrm > 1e-300) {
        if (attempt == 0) r(j, j) = nrm;
        col /= nrm;
        break;
      }
      fill_random(col, rng);
      if (basis_cols > 0) {
        col -= basis.leftCols(basis_cols) * (basis.leftCols(basis_cols).adjoint() * col);
        col -= basis.leftCols(basis_cols) * (basis.leftCols(basis_cols).adjoint() * col);
      }
      col /= col.norm();
      r.row(j).setZero();
    }
  }
  return r;
}

}  // namespace

LanczosResult block_lanczos(const BlockOperator& apply_h, const Matrix& initial_block, Index k,
                            const LanczosOptions& opts) {
  const Index n = initial_block.rows();
  const Index kb = initial_block.cols();
  if (k < 1) throw std::invalid_argument("block_lanczos: k must be >= 1");
  if (kb < k) throw std::invalid_argument("block_lanczos: initial block has fewer than k columns");
  if (n < k) throw std::invalid_argument("block_lanczos: operator dimension smaller than k");
  if (!initial_block.allFinite()) throw std::invalid_argument("block_lanczos: non-finite initial block");

  std::mt19937_64 rng(opts.seed);
  const int max_iter = std::max(opts.max_iter, 1);

  Index max_basis = opts.max_basis;
  if (max_basis > 0) max_basis = std::max<Index>(max_basis, 3 * kb);
  const Index hard_cap =
      std::min<Index>(n, max_basis > 0 ? max_basis + kb : kb * (static_cast<Index>(max_iter) + 1));

  Index capacity = max_basis > 0 ? hard_cap : std::min<Index>(hard_cap, std::max<Index>(4 * kb, 32));
  Matrix basis(n, capacity);
  Matrix t = Matrix::Zero(hard_cap, hard_cap);
  Index m = 0;      // filled basis columns
  Index first = 0;  // start of the current block

  {
    Matrix v0 = initial_block;
    orthonormalize(v0, basis, 0, rng, 1e-10);
    basis.leftCols(kb) = v0;
    m = kb;
  }

  LanczosResult res;
  Matrix w(n, kb), c, q;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    const Index cur = m - first;
    w.resize(n, cur);
    apply_h(basis.middleCols(first, cur), w);
    if (!w.allFinite()) throw std::runtime_error("block_lanczos: operator produced non-finite values");

    c.noalias() = basis.leftCols(m).adjoint() * w;
    if (opts.check_hermiticity && iter == 0) {
      const Matrix a0 = c.bottomRows(cur);
      const double asym = (a0 - a0.adjoint()).cwiseAbs().maxCoeff();
      if (asym > 1e-8 * std::max(1.0, a0.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("block_lanczos: operator is not Hermitian");
      }
    }
    t.block(0, first, m, cur) = c;
    t.block(first, 0, cur, m) = c.adjoint();

    w.noalias() -= basis.leftCols(m) * c;
    w.noalias() -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * w);

    const bool space_exhausted = m >= n;
    Matrix r_next;
    if (!space_exhausted) {
      q = w;
      r_next = orthonormalize(q, basis, m, rng, 1e-12);
    }

    // The projected eigenproblem is solved on convergence checks only; for
    // large bases that is every other iteration.
    const bool restart_pending = max_basis > 0 && m + cur > max_basis;
    const bool must_check = space_exhausted || iter + 1 == max_iter || restart_pending;
    if (!must_check && m > 96 && (iter & 1) == 0 && m + cur <= std::min(n, hard_cap)) {
      if (m + cur > capacity) {
        capacity = std::min(hard_cap, std::max(m + cur, 2 * capacity));
        basis.conservativeResize(Eigen::NoChange, capacity);
      }
      basis.middleCols(m, cur) = q;
      first = m;
      m += cur;
      continue;
    }

    eig.compute(t.topLeftCorner(m, m));
    const RealVector theta = eig.eigenvalues();
    const Matrix y = eig.eigenvectors();
    const Index got = std::min<Index>(k, m);

    res.values = theta.head(got);
    res.residuals.resize(got);
    for (Index i = 0; i < got; ++i) {
      res.residuals[i] =
          space_exhausted ? 0.0 : (r_next * y.col(i).segment(first, cur)).norm();
    }
    bool all_ok = got == k;
    for (Index i = 0; i < got && all_ok; ++i) {
      if (res.residuals[i] > opts.tol * std::max(1.0, std::abs(theta[i]))) all_ok = false;
    }
    if (all_ok || space_exhausted || iter + 1 == max_iter) {
      res.vectors.noalias() = basis.leftCols(m) * y.leftCols(got);
      res.converged = all_ok || (space_exhausted && got == k);
      return res;
    }

    if (max_basis > 0 && m + cur > max_basis) {
      // Thick restart: keep the best Ritz vectors and continue with q.
      // H X = X diag(theta_p) + q (r_next y_p) holds, so projecting H q
      // against the new basis next iteration restores an exact
      // Rayleigh-Ritz matrix.
      Index p = opts.restart_keep > 0 ? opts.restart_keep : 2 * k;
      p = std::min(p, m - 1);
      p = std::max<Index>(p, std::min<Index>(k, m - 1));
      const Index next_cols = std::min(cur, n - p);
      if (next_cols <= 0) {
        res.vectors.noalias() = basis.leftCols(m) * y.leftCols(got);
        res.converged = false;
        return res;
      }
      const Matrix x = basis.leftCols(m) * y.leftCols(p);
      basis.leftCols(p) = x;
      t.setZero();
      t.topLeftCorner(p, p) = theta.head(p).cast<Complex>().asDiagonal().toDenseMatrix();
      basis.middleCols(p, next_cols) = q.leftCols(next_cols);
      first = p;
      m = p + next_cols;
    } else {
      const Index next_cols = std::min(cur, std::min(n, hard_cap) - m);
      if (next_cols <= 0) {
        res.vectors.noalias() = basis.leftCols(m) * y.leftCols(got);
        res.converged = false;
        return res;
      }
      if (m + next_cols > capacity) {
        capacity = std::min(hard_cap, std::max(m + next_cols, 2 * capacity));
        basis.conservativeResize(Eigen::NoChange, capacity);
      }
      basis.middleCols(m, next_cols) = q.leftCols(next_cols);
      first = m;
      m += next_cols;
    }
  }
  return res;
}

}  // namespace tncirc
