#include "tncirc/mps.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tncirc {

Index BundledMps::bond_dim(int link) const {
  if (link < 0 || link >= n_sites() - 1) return 1;
  const DenseTensor& t = tensors[static_cast<std::size_t>(link)];
  return t.dim(2);
}

std::vector<Index> BundledMps::bond_dims() const {
  std::vector<Index> out;
  for (int l = 0; l + 1 < n_sites(); ++l) out.push_back(bond_dim(l));
  return out;
}

void BundledMps::check_valid() const {
  if (tensors.empty()) throw std::invalid_argument("BundledMps: no sites");
  if (center < 0 || center >= n_sites()) throw std::invalid_argument("BundledMps: bad center");
  for (int i = 0; i < n_sites(); ++i) {
    const DenseTensor& t = site(i);
    const Index want = i == center ? 4 : 3;
    if (t.rank() != want) throw std::invalid_argument("BundledMps: bad tensor rank");
    if (i == center && t.dim(3) != excitation_count) {
      throw std::invalid_argument("BundledMps: center excitation index mismatch");
    }
    if (i > 0) {
      const Index prev = site(i - 1).dim(2);
      if (t.dim(0) != prev) throw std::invalid_argument("BundledMps: bond mismatch");
    }
  }
  if (site(0).dim(0) != 1 || site(n_sites() - 1).dim(2) != 1) {
    throw std::invalid_argument("BundledMps: boundary bonds must be 1");
  }
}

BundledMps BundledMps::from_product_states(const std::vector<std::vector<Vector>>& members) {
  const int k = static_cast<int>(members.size());
  if (k < 1) throw std::invalid_argument("from_product_states: need at least one member");
  const int n = static_cast<int>(members[0].size());
  if (n < 1) throw std::invalid_argument("from_product_states: need at least one site");
  for (const auto& m : members) {
    if (static_cast<int>(m.size()) != n) {
      throw std::invalid_argument("from_product_states: member length mismatch");
    }
  }

  BundledMps out;
  out.excitation_count = k;
  out.center = 0;
  // Member-selector construction: bond index = member label. The center
  // tensor at site 0 routes excitation e to selector e.
  {
    const Index d = members[0][0].size();
    const Index r = n == 1 ? 1 : k;
    DenseTensor c({1, d, r, k});
    for (int e = 0; e < k; ++e) {
      const Vector v = members[static_cast<std::size_t>(e)][0].normalized();
      for (Index s = 0; s < d; ++s) c({0, s, n == 1 ? 0 : e, e}) = v[s];
    }
    out.tensors.push_back(std::move(c));
  }
  for (int i = 1; i < n; ++i) {
    const Index d = members[0][static_cast<std::size_t>(i)].size();
    const Index rl = k;
    const Index rr = i == n - 1 ? 1 : k;
    DenseTensor t({rl, d, rr});
    for (int e = 0; e < k; ++e) {
      const Vector v = members[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)].normalized();
      for (Index s = 0; s < d; ++s) t({e, s, i == n - 1 ? 0 : e}) = v[s];
    }
    out.tensors.push_back(std::move(t));
  }

  // Loewdin-orthonormalize the bundle by mixing the center's excitation index.
  Matrix g = bundle_overlap(out, out);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  if (eig.eigenvalues().minCoeff() < 1e-12) {
    throw std::invalid_argument("from_product_states: members are linearly dependent");
  }
  const Matrix g_inv_sqrt = eig.operatorInverseSqrt();
  DenseTensor& c = out.tensors[0];
  const Index rows = c.size() / k;
  Eigen::Map<Matrix>(c.data().data(), rows, k) =
      Eigen::Map<const Matrix>(c.data().data(), rows, k) * g_inv_sqrt;
  return canonicalize(out, 0);
}

double move_center_right(BundledMps& state, double cutoff, Index max_rank) {
  const int c = state.center;
  if (c + 1 >= state.n_sites()) throw std::invalid_argument("move_center_right: center at last site");
  const DenseTensor& ct = state.site(c);
  const Index l = ct.dim(0), d = ct.dim(1), r = ct.dim(2), k = ct.dim(3);

  // Split (l p | r e): U stays as the left-orthonormal site tensor, S Vh is
  // absorbed into the neighbor together with the excitation index.
  const SvdResult svd = truncated_svd(ct.as_matrix(2), cutoff,
                                      std::min<Index>(max_rank, std::min(l * d, r * k)));
  const Index m = svd.s.size();
  DenseTensor a({l, d, m});
  a.as_matrix(2) = svd.u;
  DenseTensor sv({m, r, k});
  sv.as_matrix(1) = svd.s.cast<Complex>().asDiagonal() * svd.vh;

  // (m r k) x (r d' r') -> (m k d' r'), contracting the shared bond r.
  const Index d2 = state.site(c + 1).dim(1), r2 = state.site(c + 1).dim(2);
  const DenseTensor svp = sv.permute({0, 2, 1});  // (m k r)
  DenseTensor next = contract_last_first(svp.reshape({m * k, r}), state.site(c + 1));
  next = next.reshape({m, k, d2 * r2}).permute({0, 2, 1});
  state.site(c) = std::move(a);
  state.site(c + 1) = next.reshape({m, d2, r2, k});
  state.center = c + 1;
  return svd.truncation_error;
}

double move_center_left(BundledMps& state, double cutoff, Index max_rank) {
  const int c = state.center;
  if (c == 0) throw std::invalid_argument("move_center_left: center at first site");
  const DenseTensor& ct = state.site(c);
  const Index l = ct.dim(0), d = ct.dim(1), r = ct.dim(2), k = ct.dim(3);

  // Split (l e | p r): Vh becomes the right-orthonormal site tensor, U S
  // moves left with the excitation index.
  const DenseTensor perm = ct.permute({0, 3, 1, 2});  // (l e d r)
  const SvdResult svd = truncated_svd(perm.as_matrix(2), cutoff,
                                      std::min<Index>(max_rank, std::min(l * k, d * r)));
  const Index m = svd.s.size();
  DenseTensor b({m, d, r});
  b.as_matrix(1) = svd.vh;
  DenseTensor us({l, k, m});
  us.as_matrix(2) = svd.u * svd.s.cast<Complex>().asDiagonal();

  // (l' d' l) x (l k m) -> (l' d' k m) -> (l' d' m k)
  DenseTensor prev = contract_last_first(state.site(c - 1), us.reshape({l, k * m}));
  const Index l1 = state.site(c - 1).dim(0), d1 = state.site(c - 1).dim(1);
  prev = prev.reshape({l1 * d1, k, m}).permute({0, 2, 1});
  state.site(c) = std::move(b);
  state.site(c - 1) = prev.reshape({l1, d1, m, k});
  state.center = c - 1;
  return svd.truncation_error;
}

BundledMps canonicalize(const BundledMps& state, int new_center) {
  if (new_center < 0 || new_center >= state.n_sites()) {
    throw std::invalid_argument("canonicalize: site index out of range");
  }
  BundledMps out = state;
  while (out.center < new_center) move_center_right(out);
  while (out.center > new_center) move_center_left(out);
  return out;
}

Matrix bundle_overlap(const BundledMps& a, const BundledMps& b) {
  if (a.n_sites() != b.n_sites()) throw std::invalid_argument("bundle_overlap: site count mismatch");
  const int n = a.n_sites();

  // Transfer contraction with environment (la, ea, lb, eb); the excitation
  // index of each bundle is absorbed when its center site is contracted.
  DenseTensor env({1, 1, 1, 1});
  env({0, 0, 0, 0}) = 1.0;
  for (int i = 0; i < n; ++i) {
    const DenseTensor& ta = a.site(i);
    const DenseTensor& tb = b.site(i);
    const Index la = ta.dim(0), d = ta.dim(1), ra = ta.dim(2);
    const Index lb = tb.dim(0), rb = tb.dim(2);
    const Index kra = i == a.center ? ta.dim(3) : 1;
    const Index krb = i == b.center ? tb.dim(3) : 1;
    if (tb.dim(1) != d) throw std::invalid_argument("bundle_overlap: physical dimension mismatch");
    const Index ea = env.dim(1), eb = env.dim(3);

    // (ea lb eb, la) * conj(ta) (la, d ra kra)
    DenseTensor lhs = env.permute({1, 2, 3, 0}).reshape({ea * lb * eb, la});
    Matrix ta_conj = Eigen::Map<const Matrix>(ta.data().data(), la, d * ra * kra).conjugate();
    DenseTensor mid({ea, lb, eb, d, ra, kra});
    mid.as_matrix(3).noalias() = lhs.as_matrix(1) * ta_conj;

    // (ea eb ra kra, lb d) * tb (lb d, rb krb) -> (ea, eb, ra, kra, rb, krb)
    DenseTensor lhs2 = mid.permute({0, 2, 4, 5, 1, 3}).reshape({ea * eb * ra * kra, lb * d});
    DenseTensor nxt({ea, eb, ra, kra, rb, krb});
    nxt.as_matrix(4).noalias() =
        lhs2.as_matrix(1) * Eigen::Map<const Matrix>(tb.data().data(), lb * d, rb * krb);
    env = nxt.permute({2, 0, 3, 4, 1, 5}).reshape({ra, ea * kra, rb, eb * krb});
  }
  Matrix g(env.dim(1), env.dim(3));
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) g(i, j) = env({0, i, 0, j});
  }
  return g;
}

double gauge_defect(const BundledMps& state) {
  double worst = 0.0;
  for (int i = 0; i < state.n_sites(); ++i) {
    if (i == state.center) continue;
    const DenseTensor& t = state.site(i);
    if (i < state.center) {
      const auto m = t.as_matrix(2);  // (l d) x r
      worst = std::max(worst, (m.adjoint() * m - Matrix::Identity(t.dim(2), t.dim(2))).cwiseAbs().maxCoeff());
    } else {
      const auto m = t.as_matrix(1);  // l x (d r)
      worst = std::max(worst, (m * m.adjoint() - Matrix::Identity(t.dim(0), t.dim(0))).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace tncirc
