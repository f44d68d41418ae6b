#pragma once

#include "tncirc/tensor.hpp"

namespace tncirc {

struct SvdResult {
  Matrix u;              // isometry, columns orthonormal
  RealVector s;          // nonincreasing, nonnegative
  Matrix vh;             // isometry, rows orthonormal
  double truncation_error = 0.0;  // sum of squared discarded values / sum of all
};

// Truncated SVD. A singular value is kept while its squared weight fraction
// s_i^2 / sum_j s_j^2 exceeds `cutoff`, up to `max_rank` values. A degenerate
// group (values equal within 1e-10 relative) straddling the cutoff boundary is
// kept whole, still capped by max_rank. At least one value is always retained.
SvdResult truncated_svd(const Matrix& m, double cutoff, Index max_rank);

}  // namespace tncirc
