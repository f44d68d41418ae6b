#pragma once

#include <vector>

#include "tncirc/tensor.hpp"

namespace tncirc {

// Matrix-product operator: per-site tensors with indices
// (left bond, physical out, physical in, right bond). Boundary bonds are 1.
// `energy_offset` records a scalar multiple of the identity that was removed
// from the encoded operator (the full operator is MPO + offset * Id).
struct Mpo {
  std::vector<DenseTensor> tensors;
  double energy_offset = 0.0;

  int n_sites() const { return static_cast<int>(tensors.size()); }
  Index phys_dim(int site) const { return tensors[static_cast<std::size_t>(site)].dim(1); }
  Index bond_dim(int link) const;
  std::vector<Index> bond_dims() const;
  const DenseTensor& site(int i) const { return tensors[static_cast<std::size_t>(i)]; }
  DenseTensor& site(int i) { return tensors[static_cast<std::size_t>(i)]; }
  void check_valid() const;
};

Mpo identity_mpo(const std::vector<Index>& phys_dims);

// Product operator  coeff * O_0 x O_1 x ... x O_{N-1}, bond dimension 1.
Mpo product_mpo(const std::vector<Matrix>& site_ops, Complex coeff = 1.0);

// Identity everywhere except `site_op` at `site`.
Mpo single_site_mpo(const std::vector<Index>& phys_dims, const Matrix& site_op, int site);

// One operator string of a sum Hamiltonian.
struct OperatorString {
  Complex coeff = 1.0;
  std::vector<Matrix> ops;  // one per site, empty entries mean identity
};

// MPO for  sum_i h_i  +  sum_{j>i} g(i,j) a_i a_j  +  sum_s strings, where h_i
// are site terms, a_i the per-site coupling operators and g a real symmetric
// coefficient matrix (strict upper triangle used). The two-body part is
// encoded through rank factorizations of the off-diagonal coefficient blocks,
// so the bond dimension is 2 + numerical rank at each cut; each string adds 1.
Mpo build_sum_mpo(const std::vector<Matrix>& site_terms, const std::vector<Matrix>& coupling_ops,
                  const RealMatrix& coupling, const std::vector<OperatorString>& strings = {},
                  double coeff_rank_cutoff = 1e-14);

Mpo mpo_add(const Mpo& a, const Mpo& b);

// Two-pass compression: left-to-right orthogonalization sweep followed by a
// right-to-left truncating sweep with the squared-weight cutoff rule. Bond
// dimensions never increase.
Mpo mpo_compress(const Mpo& op, double cutoff);

}  // namespace tncirc
