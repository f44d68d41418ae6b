#include "tncirc/contraction.hpp"

#include <stdexcept>

namespace tncirc {

DenseTensor make_boundary_env() {
  DenseTensor e({1, 1, 1});
  e({0, 0, 0}) = 1.0;
  return e;
}

DenseTensor update_left_env(const DenseTensor& env, const DenseTensor& bra_site,
                            const DenseTensor& mpo_site, const DenseTensor& ket_site) {
  const Index a = env.dim(0), w = env.dim(1), b = env.dim(2);
  const Index ap = bra_site.dim(2), bp = ket_site.dim(2);
  const Index s_out = mpo_site.dim(1), s_in = mpo_site.dim(2), wp = mpo_site.dim(3);

  // env (a,w,b) x ket (b,s,b') -> (a,w,s,b')
  DenseTensor t1({a, w, s_in, bp});
  t1.as_matrix(2).noalias() = env.as_matrix(2) * ket_site.as_matrix(1);
  // (a,b',w,s) x W (w,s_in -> s_out,w') -> (a,b',s_out,w')
  DenseTensor t1p = t1.permute({0, 3, 1, 2});
  DenseTensor wp1 = mpo_site.permute({0, 2, 1, 3});  // (w, s_in, s_out, w')
  DenseTensor t2({a, bp, s_out, wp});
  t2.as_matrix(2).noalias() = t1p.reshape({a * bp, w * s_in}).as_matrix(1) * wp1.reshape({w * s_in, s_out * wp}).as_matrix(1);
  // (b',w',a,s_out) x conj(bra) (a,s_out -> a') -> (b',w',a')
  DenseTensor t2p = t2.permute({1, 3, 0, 2});
  DenseTensor out({bp, wp, ap});
  out.as_matrix(2).noalias() =
      t2p.reshape({bp * wp, a * s_out}).as_matrix(1) *
      Eigen::Map<const Matrix>(bra_site.data().data(), a * s_out, ap).conjugate();
  return out.permute({2, 1, 0});
}

DenseTensor update_right_env(const DenseTensor& env, const DenseTensor& bra_site,
                             const DenseTensor& mpo_site, const DenseTensor& ket_site) {
  const Index a = env.dim(0), w = env.dim(1), b = env.dim(2);
  const Index ap = bra_site.dim(0), bp = ket_site.dim(0);
  const Index s_out = mpo_site.dim(1), s_in = mpo_site.dim(2), wl = mpo_site.dim(0);

  // ket (b',s,b) x env (a,w,b): contract over b -> (b',s,a,w)
  DenseTensor envp = env.permute({2, 0, 1});  // (b,a,w)
  DenseTensor t1({bp, s_in, a, w});
  t1.as_matrix(2).noalias() = ket_site.as_matrix(2) * envp.reshape({b, a * w}).as_matrix(1);
  // (b',a,s,w) x Wp (s_in,w' -> wl,s_out) -> (b',a,wl,s_out)
  DenseTensor t1p = t1.permute({0, 2, 1, 3});
  DenseTensor wp1 = mpo_site.permute({2, 3, 0, 1});  // (s_in, w', wl, s_out)
  DenseTensor t2({bp, a, wl, s_out});
  t2.as_matrix(2).noalias() = t1p.reshape({bp * a, s_in * w}).as_matrix(1) * wp1.reshape({s_in * w, wl * s_out}).as_matrix(1);
  // (b',wl,s_out,a) x conj(bra) over (s_out, a) -> (b',wl,a')
  DenseTensor t2p = t2.permute({0, 2, 3, 1});      // (b', wl, s_out, a)
  DenseTensor brap = bra_site.permute({1, 2, 0});  // (s, a_right, a_left)
  DenseTensor out({bp, wl, ap});
  out.as_matrix(2).noalias() =
      t2p.reshape({bp * wl, s_out * a}).as_matrix(1) *
      Eigen::Map<const Matrix>(brap.data().data(), s_out * a, ap).conjugate();
  return out.permute({2, 1, 0});
}

TwoSiteOperator::TwoSiteOperator(const DenseTensor& left_env, const DenseTensor& w1,
                                 const DenseTensor& w2, const DenseTensor& right_env)
    : lenv_(&left_env), w1_(&w1), w2_(&w2), renv_(&right_env) {
  l_ = left_env.dim(2);
  d1_ = w1.dim(2);
  d2_ = w2.dim(2);
  r_ = right_env.dim(2);
  dim_ = l_ * d1_ * d2_ * r_;
  if (left_env.dim(0) != l_ || right_env.dim(0) != r_) {
    throw std::invalid_argument("TwoSiteOperator: bra/ket bond mismatch");
  }
}

void TwoSiteOperator::apply(const Matrix& in, Matrix& out) const {
  const Index k = in.cols();
  if (in.rows() != dim_) throw std::invalid_argument("TwoSiteOperator: dimension mismatch");
  const Index wl = lenv_->dim(1);
  const Index wm = w1_->dim(3);
  const Index wr = renv_->dim(1);
  const Index rb = renv_->dim(0);

  // x (l,s1,s2,r,k) contracted with R (rb,w,r) -> (l,s1,s2,k,rb,w)
  DenseTensor x({l_, d1_, d2_, r_, k},
                Eigen::Map<const Vector>(in.data(), dim_ * k));
  DenseTensor xp = x.permute({0, 1, 2, 4, 3});  // (l,s1,s2,k,r)
  DenseTensor rp = renv_->permute({2, 0, 1});   // (r, rb, w)
  DenseTensor t1({l_, d1_, d2_, k, rb, wr});
  t1.as_matrix(4).noalias() = xp.reshape({l_ * d1_ * d2_ * k, r_}).as_matrix(1) *
                              rp.reshape({r_, rb * wr}).as_matrix(1);

  // t1 (l,s1,k,rb, s2,w) x W2 (s2_in, wr -> wm, s2_out) -> (l,s1,k,rb,wm,s2')
  DenseTensor t1p = t1.permute({0, 1, 3, 4, 2, 5});  // (l,s1,k,rb,s2,w)
  DenseTensor w2p = w2_->permute({2, 3, 0, 1});      // (s2_in, wr, wm, s2_out)
  DenseTensor t2({l_, d1_, k, rb, wm, d2_});
  t2.as_matrix(4).noalias() = t1p.reshape({l_ * d1_ * k * rb, d2_ * wr}).as_matrix(1) *
                              w2p.reshape({d2_ * wr, wm * d2_}).as_matrix(1);

  // t2 (l,k,rb,s2', s1,wm) x W1 (s1_in, wm -> wl, s1') -> (l,k,rb,s2',wl,s1')
  DenseTensor t2p = t2.permute({0, 2, 3, 5, 1, 4});  // (l,k,rb,s2',s1,wm)
  DenseTensor w1p = w1_->permute({2, 3, 0, 1});      // (s1_in, wm, wl, s1_out)
  DenseTensor t3({l_, k, rb, d2_, wl, d1_});
  t3.as_matrix(4).noalias() = t2p.reshape({l_ * k * rb * d2_, d1_ * wm}).as_matrix(1) *
                              w1p.reshape({d1_ * wm, wl * d1_}).as_matrix(1);

  // t3 (k,rb,s2',s1', l,wl) x L (l_ket, wl -> lb) -> (k,rb,s2',s1',lb)
  DenseTensor t3p = t3.permute({1, 2, 3, 5, 0, 4});  // (k,rb,s2',s1',l,wl)
  DenseTensor lp = lenv_->permute({2, 1, 0});        // (l_ket, wl, lb)
  const Index lb = lenv_->dim(0);
  DenseTensor t4({k, rb, d2_, d1_, lb});
  t4.as_matrix(4).noalias() = t3p.reshape({k * rb * d2_ * d1_, l_ * wl}).as_matrix(1) *
                              lp.reshape({l_ * wl, lb}).as_matrix(1);

  DenseTensor y = t4.permute({4, 3, 2, 1, 0});  // (lb, s1', s2', rb, k)
  out.resize(dim_, k);
  Eigen::Map<Vector>(out.data(), dim_ * k) = y.data();
}

Matrix mpo_matrix_elements(const BundledMps& bra, const Mpo& op, const BundledMps& ket) {
  if (bra.n_sites() != ket.n_sites() || op.n_sites() != ket.n_sites()) {
    throw std::invalid_argument("mpo_matrix_elements: site count mismatch");
  }
  const int n = ket.n_sites();
  // env (a, ea, w, b, eb)
  DenseTensor env({1, 1, 1, 1, 1});
  env({0, 0, 0, 0, 0}) = 1.0;
  for (int i = 0; i < n; ++i) {
    const DenseTensor& ta = bra.site(i);
    const DenseTensor& tb = ket.site(i);
    const DenseTensor& wt = op.site(i);
    const Index a = ta.dim(0), ap = ta.dim(2), ka = i == bra.center ? ta.dim(3) : 1;
    const Index b = tb.dim(0), bp = tb.dim(2), kb = i == ket.center ? tb.dim(3) : 1;
    const Index w = wt.dim(0), s_out = wt.dim(1), s_in = wt.dim(2), wp = wt.dim(3);
    if (ta.dim(1) != s_out || tb.dim(1) != s_in) {
      throw std::invalid_argument("mpo_matrix_elements: physical dimension mismatch");
    }
    const Index ea = env.dim(1), eb = env.dim(4);

    // env x ket over b -> (a,ea,w,eb, s_in, b', kb)
    DenseTensor t1({a, ea, w, eb, s_in, bp, kb});
    t1.as_matrix(4).noalias() = env.permute({0, 1, 2, 4, 3}).reshape({a * ea * w * eb, b}).as_matrix(1) *
                                Eigen::Map<const Matrix>(tb.data().data(), b, s_in * bp * kb);
    // x W over (w, s_in) -> (a,ea,eb,b',kb, s_out, w')
    DenseTensor t1p = t1.permute({0, 1, 3, 5, 6, 2, 4});
    DenseTensor wtp = wt.permute({0, 2, 1, 3});  // (w, s_in, s_out, w')
    DenseTensor t2({a, ea, eb, bp, kb, s_out, wp});
    t2.as_matrix(5).noalias() = t1p.reshape({a * ea * eb * bp * kb, w * s_in}).as_matrix(1) *
                                wtp.reshape({w * s_in, s_out * wp}).as_matrix(1);
    // x conj(bra) over (a, s_out) -> (ea,eb,b',kb,w', a', ka)
    DenseTensor t2p = t2.permute({1, 2, 3, 4, 6, 0, 5});
    DenseTensor t3({ea, eb, bp, kb, wp, ap, ka});
    t3.as_matrix(5).noalias() =
        t2p.reshape({ea * eb * bp * kb * wp, a * s_out}).as_matrix(1) *
        Eigen::Map<const Matrix>(ta.data().data(), a * s_out, ap * ka).conjugate();
    env = t3.permute({5, 0, 6, 4, 2, 1, 3}).reshape({ap, ea * ka, wp, bp, eb * kb});
  }
  Matrix g(env.dim(1), env.dim(4));
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) g(i, j) = env({0, i, 0, 0, j});
  }
  if (op.energy_offset != 0.0) g += op.energy_offset * bundle_overlap(bra, ket);
  return g;
}

Complex matrix_element(const BundledMps& bra, int bra_member, const Mpo& op,
                       const BundledMps& ket, int ket_member) {
  if (bra_member < 0 || bra_member >= bra.excitation_count || ket_member < 0 ||
      ket_member >= ket.excitation_count) {
    throw std::invalid_argument("matrix_element: member index out of range");
  }
  return mpo_matrix_elements(bra, op, ket)(bra_member, ket_member);
}

Matrix site_expectations(const BundledMps& state, const std::vector<Matrix>& site_ops) {
  const int n = state.n_sites();
  if (static_cast<int>(site_ops.size()) != n) {
    throw std::invalid_argument("site_expectations: need one operator per site");
  }
  const int k = state.excitation_count;
  Matrix out(k, n);
  BundledMps s = canonicalize(state, 0);
  for (int i = 0; i < n; ++i) {
    const DenseTensor& c = s.site(i);
    const Index l = c.dim(0), d = c.dim(1), r = c.dim(2);
    const Matrix& op = site_ops[static_cast<std::size_t>(i)];
    if (op.rows() != d || op.cols() != d) {
      throw std::invalid_argument("site_expectations: operator dimension mismatch");
    }
    // <C_e| op |C_e>: contract over (l, s, r).
    DenseTensor cp = c.permute({1, 0, 2, 3});  // (s, l, r, e)
    for (int e = 0; e < k; ++e) {
      Eigen::Map<const Matrix> ce(cp.data().data() + static_cast<std::ptrdiff_t>(e) * d * l * r, d, l * r);
      out(e, i) = (ce.conjugate().cwiseProduct(op * ce)).sum();
    }
    if (i + 1 < n) move_center_right(s);
  }
  return out;
}

Complex local_expectation(const BundledMps& state, const Matrix& site_op, int site, int member) {
  if (site < 0 || site >= state.n_sites()) throw std::invalid_argument("local_expectation: bad site");
  std::vector<Matrix> ops;
  for (int i = 0; i < state.n_sites(); ++i) {
    const Index d = state.phys_dim(i);
    ops.push_back(i == site ? site_op : Matrix::Identity(d, d));
  }
  Mpo op = product_mpo(ops);
  return matrix_element(state, member, op, state, member);
}

}  // namespace tncirc
