#include "tncirc/tensor.hpp"

#include <numeric>
#include <stdexcept>

namespace tncirc {

Index shape_product(std::span<const Index> dims) {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

DenseTensor::DenseTensor(std::vector<Index> shape)
    : shape_(std::move(shape)), data_(Vector::Zero(shape_product(shape_))) {
  for (Index d : shape_) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
  }
}

DenseTensor::DenseTensor(std::vector<Index> shape, Vector data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_)) {
    throw std::invalid_argument("tensor data size does not match shape");
  }
}

DenseTensor DenseTensor::zeros(std::vector<Index> shape) {
  return DenseTensor(std::move(shape));
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
  DenseTensor t({m.rows(), m.cols()});
  t.as_matrix(1) = m;
  return t;
}

namespace {

Index flat_index(std::span<const Index> shape, std::span<const Index> idx) {
  if (idx.size() != shape.size()) throw std::invalid_argument("index rank mismatch");
  Index flat = 0;
  Index stride = 1;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= shape[a]) throw std::out_of_range("tensor index");
    flat += idx[a] * stride;
    stride *= shape[a];
  }
  return flat;
}

}  // namespace

Complex& DenseTensor::operator()(std::span<const Index> idx) {
  return data_[flat_index(shape_, idx)];
}

Complex DenseTensor::operator()(std::span<const Index> idx) const {
  return data_[flat_index(shape_, idx)];
}

Complex& DenseTensor::operator()(std::initializer_list<Index> idx) {
  return (*this)(std::span<const Index>(idx.begin(), idx.size()));
}

Complex DenseTensor::operator()(std::initializer_list<Index> idx) const {
  return (*this)(std::span<const Index>(idx.begin(), idx.size()));
}

DenseTensor DenseTensor::reshape(std::vector<Index> new_shape) const {
  if (shape_product(new_shape) != size()) {
    throw std::invalid_argument("reshape changes total size");
  }
  return DenseTensor(std::move(new_shape), data_);
}

DenseTensor DenseTensor::permute(const std::vector<Index>& perm) const {
  const auto r = static_cast<std::size_t>(rank());
  if (perm.size() != r) throw std::invalid_argument("permutation rank mismatch");
  std::vector<bool> seen(r, false);
  std::vector<Index> new_shape(r);
  for (std::size_t j = 0; j < r; ++j) {
    const auto p = static_cast<std::size_t>(perm[j]);
    if (p >= r || seen[p]) throw std::invalid_argument("invalid permutation");
    seen[p] = true;
    new_shape[j] = shape_[p];
  }

  // Strides of each output axis within the input layout.
  std::vector<Index> in_strides(r);
  {
    Index s = 1;
    for (std::size_t a = 0; a < r; ++a) {
      in_strides[a] = s;
      s *= shape_[a];
    }
  }
  std::vector<Index> out_axis_stride(r);
  for (std::size_t j = 0; j < r; ++j) out_axis_stride[j] = in_strides[static_cast<std::size_t>(perm[j])];

  DenseTensor out(new_shape);
  const Index total = size();
  std::vector<Index> counter(r, 0);
  Index src = 0;
  for (Index flat = 0; flat < total; ++flat) {
    out.data_[flat] = data_[src];
    for (std::size_t j = 0; j < r; ++j) {
      counter[j]++;
      src += out_axis_stride[j];
      if (counter[j] < new_shape[j]) break;
      src -= new_shape[j] * out_axis_stride[j];
      counter[j] = 0;
    }
  }
  return out;
}

Eigen::Map<const Matrix> DenseTensor::as_matrix(Index left_axes) const {
  const Index rows = shape_product(std::span<const Index>(shape_.data(), static_cast<std::size_t>(left_axes)));
  const Index cols = size() / std::max<Index>(rows, 1);
  return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

Eigen::Map<Matrix> DenseTensor::as_matrix(Index left_axes) {
  const Index rows = shape_product(std::span<const Index>(shape_.data(), static_cast<std::size_t>(left_axes)));
  const Index cols = size() / std::max<Index>(rows, 1);
  return Eigen::Map<Matrix>(data_.data(), rows, cols);
}

bool DenseTensor::all_finite() const {
  return data_.allFinite();
}

DenseTensor contract_last_first(const DenseTensor& a, const DenseTensor& b) {
  const Index k = a.dim(a.rank() - 1);
  if (k != b.dim(0)) throw std::invalid_argument("contraction dimension mismatch");
  std::vector<Index> out_shape;
  for (Index j = 0; j + 1 < a.rank(); ++j) out_shape.push_back(a.dim(j));
  for (Index j = 1; j < b.rank(); ++j) out_shape.push_back(b.dim(j));
  if (out_shape.empty()) out_shape.push_back(1);
  DenseTensor out(out_shape);
  out.as_matrix(a.rank() - 1) = a.as_matrix(a.rank() - 1) * b.as_matrix(1);
  return out;
}

}  // namespace tncirc
