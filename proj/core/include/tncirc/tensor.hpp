#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tncirc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense complex tensor with an arbitrary number of indices, stored
// column-major (first index fastest). Reshapes are free; permutations copy.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> shape);
  DenseTensor(std::vector<Index> shape, Vector data);

  static DenseTensor zeros(std::vector<Index> shape);
  // Rank-2 tensor wrapping a matrix.
  static DenseTensor from_matrix(const Matrix& m);

  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  const std::vector<Index>& shape() const { return shape_; }
  Index size() const { return data_.size(); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  Complex& operator()(std::span<const Index> idx);
  Complex operator()(std::span<const Index> idx) const;
  Complex& operator()(std::initializer_list<Index> idx);
  Complex operator()(std::initializer_list<Index> idx) const;

  // Same entries, new shape; total size must match.
  DenseTensor reshape(std::vector<Index> new_shape) const;
  // Axis permutation: result index j corresponds to input index perm[j].
  DenseTensor permute(const std::vector<Index>& perm) const;

  // View as a matrix splitting the first `left_axes` indices from the rest.
  Eigen::Map<const Matrix> as_matrix(Index left_axes) const;
  Eigen::Map<Matrix> as_matrix(Index left_axes);

  bool all_finite() const;

 private:
  std::vector<Index> shape_;
  Vector data_;
};

// Contract the last index of a with the first index of b (matrix product on
// the matricized forms).
DenseTensor contract_last_first(const DenseTensor& a, const DenseTensor& b);

Index shape_product(std::span<const Index> dims);

}  // namespace tncirc
