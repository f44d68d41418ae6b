#include "tncirc/svd.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace tncirc {

SvdResult truncated_svd(const Matrix& m, double cutoff, Index max_rank) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("truncated_svd: empty matrix");
  if (cutoff < 0.0) throw std::invalid_argument("truncated_svd: negative cutoff");
  if (max_rank < 1) throw std::invalid_argument("truncated_svd: max_rank must be >= 1");
  if (!m.allFinite()) throw std::invalid_argument("truncated_svd: non-finite entries in input");

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Index total = s.size();
  const double weight = s.squaredNorm();

  Index keep = total;
  if (weight > 0.0) {
    keep = 0;
    while (keep < total && s[keep] * s[keep] > cutoff * weight) ++keep;
    if (keep == 0) keep = 1;
    // Extend through a degenerate group at the boundary.
    while (keep < total && s[keep] >= s[keep - 1] * (1.0 - 1e-10)) ++keep;
  }
  keep = std::min(keep, std::min(max_rank, total));

  SvdResult out;
  out.u = svd.matrixU().leftCols(keep);
  out.s = s.head(keep);
  out.vh = svd.matrixV().leftCols(keep).adjoint();
  out.truncation_error =
      weight > 0.0 ? s.tail(total - keep).squaredNorm() / weight : 0.0;
  return out;
}

}  // namespace tncirc
