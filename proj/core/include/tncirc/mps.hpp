#pragma once

#include <vector>

#include "tncirc/svd.hpp"
#include "tncirc/tensor.hpp"

namespace tncirc {

// Matrix-product state carrying k excitations at once. Every site tensor has
// indices (left bond, physical, right bond) and is shared by all bundle
// members; the orthogonality-center tensor carries one extra trailing index of
// size k that enumerates the excitations. Tensors left of the center are
// left-orthonormal, tensors right of it right-orthonormal.
struct BundledMps {
  std::vector<DenseTensor> tensors;
  int center = 0;
  int excitation_count = 1;

  int n_sites() const { return static_cast<int>(tensors.size()); }
  Index phys_dim(int site) const { return tensors[static_cast<std::size_t>(site)].dim(1); }
  // Bond between site `link` and `link`+1; boundaries have dimension 1.
  Index bond_dim(int link) const;
  std::vector<Index> bond_dims() const;

  const DenseTensor& site(int i) const { return tensors[static_cast<std::size_t>(i)]; }
  DenseTensor& site(int i) { return tensors[static_cast<std::size_t>(i)]; }

  void check_valid() const;

  // Bundle of k orthonormal states, each a product state over the given
  // per-site vectors: members[e][i] is the site-i vector of member e.
  // Orthonormalized with a Loewdin transform on the bundle index.
  static BundledMps from_product_states(const std::vector<std::vector<Vector>>& members);
};

// Move the orthogonality center to `new_center`, transporting the excitation
// index via exact (untruncated) SVD splits. Gauge conditions hold at the new
// center; bundle overlaps are preserved.
BundledMps canonicalize(const BundledMps& state, int new_center);

// One-step center moves used by canonicalize and the DMRG sweeps. `trunc`
// controls the SVD split of the center tensor. Both mutate in place and
// report the truncation error of the split.
double move_center_right(BundledMps& state, double cutoff = 0.0,
                         Index max_rank = std::numeric_limits<Index>::max());
double move_center_left(BundledMps& state, double cutoff = 0.0,
                        Index max_rank = std::numeric_limits<Index>::max());

// Overlap matrix  <a_i | b_j>  between the members of two bundles defined on
// the same sites. For a single bundle, bundle_overlap(s, s) should be the
// identity.
Matrix bundle_overlap(const BundledMps& a, const BundledMps& b);

// Max deviation from the site isometry conditions (left-orthonormal strictly
// left of the center, right-orthonormal strictly right of it).
double gauge_defect(const BundledMps& state);

}  // namespace tncirc
