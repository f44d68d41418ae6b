#pragma once

#include "tncirc/mpo.hpp"
#include "tncirc/mps.hpp"

namespace tncirc {

// Environments carry indices (bra bond, mpo bond, ket bond). Site tensors
// passed to the update functions are plain rank-3 MPS tensors (gauge tensors
// away from the center).
DenseTensor make_boundary_env();
DenseTensor update_left_env(const DenseTensor& env, const DenseTensor& bra_site,
                            const DenseTensor& mpo_site, const DenseTensor& ket_site);
DenseTensor update_right_env(const DenseTensor& env, const DenseTensor& bra_site,
                             const DenseTensor& mpo_site, const DenseTensor& ket_site);

// Effective two-site operator  L * W_i * W_{i+1} * R  acting on blocks of
// vectors of shape (l, d_i, d_{i+1}, r) flattened column-wise.
class TwoSiteOperator {
 public:
  TwoSiteOperator(const DenseTensor& left_env, const DenseTensor& w1, const DenseTensor& w2,
                  const DenseTensor& right_env);
  Index dimension() const { return dim_; }
  void apply(const Matrix& in, Matrix& out) const;

 private:
  const DenseTensor *lenv_, *w1_, *w2_, *renv_;
  Index l_, d1_, d2_, r_, dim_;
};

// Full matrix  <bra_i| op |ket_j>  between two bundles, including the MPO's
// recorded scalar offset.
Matrix mpo_matrix_elements(const BundledMps& bra, const Mpo& op, const BundledMps& ket);

Complex matrix_element(const BundledMps& bra, int bra_member, const Mpo& op,
                       const BundledMps& ket, int ket_member);

// <psi_k| op_i |psi_k> for one single-site operator per site, all bundle
// members at once; returns (excitation_count x n_sites). Computed by sweeping
// the orthogonality center once across the chain.
Matrix site_expectations(const BundledMps& state, const std::vector<Matrix>& site_ops);

Complex local_expectation(const BundledMps& state, const Matrix& site_op, int site, int member);

}  // namespace tncirc
