#pragma once

#include <cstdint>
#include <functional>

#include "tncirc/tensor.hpp"

namespace tncirc {

inline constexpr std::uint64_t kDefaultSeed = 0x7c1e5eed;

// Operator action on a block of column vectors: out = H * in. The operator
// must be Hermitian (caller contract; checked to 1e-8 on the first block).
using BlockOperator = std::function<void(const Matrix& in, Matrix& out)>;

struct LanczosOptions {
  double tol = 1e-12;
  int max_iter = 200;
  std::uint64_t seed = kDefaultSeed;
  // Bounded-basis (thick-restart) mode: maximum number of basis vectors kept.
  // 0 means unbounded (classic block Lanczos with full reorthogonalization).
  Index max_basis = 0;
  // Ritz vectors retained at a restart; 0 picks 2*k.
  Index restart_keep = 0;
  bool check_hermiticity = true;
};

struct LanczosResult {
  RealVector values;      // k lowest Ritz values, nondecreasing
  Matrix vectors;         // n x k, mutually orthonormal
  RealVector residuals;   // ||H v - lambda v|| per pair
  bool converged = false;
  int iterations = 0;
};

// Lowest-k eigenpairs of a Hermitian operator by block Lanczos with full
// reorthogonalization. Deflated directions are re-seeded with deterministic
// pseudo-random vectors orthogonal to the current space. If `tol` is not
// reached within max_iter iterations the best estimates are returned with
// converged = false.
LanczosResult block_lanczos(const BlockOperator& apply_h, const Matrix& initial_block,
                            Index k, const LanczosOptions& opts = {});

}  // namespace tncirc
