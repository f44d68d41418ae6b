#include "tncirc/mpo.hpp"

#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "tncirc/svd.hpp"

namespace tncirc {

Index Mpo::bond_dim(int link) const {
  if (link < 0 || link >= n_sites() - 1) return 1;
  return tensors[static_cast<std::size_t>(link)].dim(3);
}

std::vector<Index> Mpo::bond_dims() const {
  std::vector<Index> out;
  for (int l = 0; l + 1 < n_sites(); ++l) out.push_back(bond_dim(l));
  return out;
}

void Mpo::check_valid() const {
  if (tensors.empty()) throw std::invalid_argument("Mpo: no sites");
  for (int i = 0; i < n_sites(); ++i) {
    const DenseTensor& t = site(i);
    if (t.rank() != 4) throw std::invalid_argument("Mpo: tensors must have rank 4");
    if (i > 0 && t.dim(0) != site(i - 1).dim(3)) throw std::invalid_argument("Mpo: bond mismatch");
  }
  if (site(0).dim(0) != 1 || site(n_sites() - 1).dim(3) != 1) {
    throw std::invalid_argument("Mpo: boundary bonds must be 1");
  }
}

namespace {

void put_op(DenseTensor& w, Index row, Index col, const Matrix& op, Complex coeff = 1.0) {
  const Index d_out = w.dim(1), d_in = w.dim(2);
  if (op.rows() != d_out || op.cols() != d_in) throw std::invalid_argument("put_op: dimension mismatch");
  for (Index b = 0; b < d_in; ++b) {
    for (Index a = 0; a < d_out; ++a) {
      w({row, a, b, col}) += coeff * op(a, b);
    }
  }
}

void put_identity(DenseTensor& w, Index row, Index col, Complex coeff = 1.0) {
  const Index d = w.dim(1);
  for (Index a = 0; a < d; ++a) w({row, a, a, col}) += coeff;
}

}  // namespace

Mpo identity_mpo(const std::vector<Index>& phys_dims) {
  Mpo out;
  for (Index d : phys_dims) {
    DenseTensor w({1, d, d, 1});
    put_identity(w, 0, 0);
    out.tensors.push_back(std::move(w));
  }
  return out;
}

Mpo product_mpo(const std::vector<Matrix>& site_ops, Complex coeff) {
  if (site_ops.empty()) throw std::invalid_argument("product_mpo: no sites");
  Mpo out;
  for (std::size_t i = 0; i < site_ops.size(); ++i) {
    const Index d = site_ops[i].rows();
    DenseTensor w({1, d, d, 1});
    put_op(w, 0, 0, site_ops[i], i == 0 ? coeff : Complex(1.0));
    out.tensors.push_back(std::move(w));
  }
  return out;
}

Mpo single_site_mpo(const std::vector<Index>& phys_dims, const Matrix& site_op, int site) {
  if (site < 0 || site >= static_cast<int>(phys_dims.size())) {
    throw std::invalid_argument("single_site_mpo: site out of range");
  }
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < phys_dims.size(); ++i) {
    if (static_cast<int>(i) == site) {
      ops.push_back(site_op);
    } else {
      ops.push_back(Matrix::Identity(phys_dims[i], phys_dims[i]));
    }
  }
  return product_mpo(ops);
}

Mpo build_sum_mpo(const std::vector<Matrix>& site_terms, const std::vector<Matrix>& coupling_ops,
                  const RealMatrix& coupling, const std::vector<OperatorString>& strings,
                  double coeff_rank_cutoff) {
  const int n = static_cast<int>(site_terms.size());
  if (n < 1) throw std::invalid_argument("build_sum_mpo: no sites");
  const bool has_pairs = coupling.size() > 0 && n > 1;
  if (has_pairs) {
    if (coupling.rows() != n || coupling.cols() != n) {
      throw std::invalid_argument("build_sum_mpo: coupling matrix size mismatch");
    }
    if (static_cast<int>(coupling_ops.size()) != n) {
      throw std::invalid_argument("build_sum_mpo: coupling op count mismatch");
    }
  }
  const int ns = static_cast<int>(strings.size());
  for (const auto& s : strings) {
    if (static_cast<int>(s.ops.size()) != n) {
      throw std::invalid_argument("build_sum_mpo: string length mismatch");
    }
  }

  // Rank factorization of the strictly-upper coefficient blocks at each cut:
  // G_b = g[0..b, b+1..n-1] = A_b * B_b with A_b (b+1 x r_b). Carries at bond
  // b represent sum_{a<=b} A_b[a, rho] op_a; the transition matrix expresses
  // A_b's first b rows in the previous carry basis.
  std::vector<Eigen::MatrixXd> a_fac(static_cast<std::size_t>(std::max(n - 1, 0)));
  std::vector<Eigen::MatrixXd> b_fac(static_cast<std::size_t>(std::max(n - 1, 0)));
  std::vector<Eigen::MatrixXd> trans(static_cast<std::size_t>(std::max(n - 1, 0)));
  if (has_pairs) {
    for (int b = 0; b + 1 < n; ++b) {
      const Eigen::MatrixXd block = coupling.topRightCorner(b + 1, n - 1 - b);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& s = svd.singularValues();
      Index r = 0;
      const double smax = s.size() > 0 ? s[0] : 0.0;
      while (r < s.size() && s[r] > coeff_rank_cutoff * std::max(smax, 1.0)) ++r;
      a_fac[b] = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
      b_fac[b] = svd.matrixV().leftCols(r).transpose();
      if (b > 0) {
        const Index r_prev = a_fac[b - 1].cols();
        if (r_prev > 0 && r > 0) {
          trans[b] = a_fac[b - 1].colPivHouseholderQr().solve(a_fac[b].topRows(b));
        } else {
          trans[b] = Eigen::MatrixXd::Zero(r_prev, r);
        }
      }
    }
  }

  auto rank_at = [&](int bond) -> Index {
    if (!has_pairs || bond < 0 || bond >= n - 1) return 0;
    return a_fac[static_cast<std::size_t>(bond)].cols();
  };

  Mpo out;
  for (int i = 0; i < n; ++i) {
    const Index d = site_terms[static_cast<std::size_t>(i)].rows();
    const Index rl = i == 0 ? 1 : 2 + rank_at(i - 1) + ns;
    const Index rr = i == n - 1 ? 1 : 2 + rank_at(i) + ns;
    DenseTensor w({rl, d, d, rr});

    // State layout on interior bonds: 0 = start, 1..r = carries,
    // r+1..r+ns = strings, last = done.
    const Index row_start = 0;
    const Index row_done = rl - 1;
    const Index col_start = 0;
    const Index col_done = rr - 1;

    if (i == 0) {
      if (n > 1) {
        put_identity(w, row_start, col_start);
        for (Index rho = 0; rho < rank_at(0); ++rho) {
          put_op(w, row_start, 1 + rho, coupling_ops[0], a_fac[0](0, rho));
        }
        for (int s = 0; s < ns; ++s) {
          put_op(w, row_start, 1 + rank_at(0) + s, strings[s].ops[0], strings[s].coeff);
        }
        put_op(w, row_start, col_done, site_terms[0]);
      } else {
        put_op(w, row_start, 0, site_terms[0]);
        for (int s = 0; s < ns; ++s) put_op(w, row_start, 0, strings[s].ops[0], strings[s].coeff);
      }
    } else if (i == n - 1) {
      put_op(w, row_start, 0, site_terms[static_cast<std::size_t>(i)]);
      for (Index rho = 0; rho < rank_at(i - 1); ++rho) {
        put_op(w, 1 + rho, 0, coupling_ops[static_cast<std::size_t>(i)], b_fac[i - 1](rho, 0));
      }
      for (int s = 0; s < ns; ++s) {
        put_op(w, 1 + rank_at(i - 1) + s, 0, strings[s].ops[static_cast<std::size_t>(i)]);
      }
      put_identity(w, row_done, 0);
    } else {
      put_identity(w, row_start, col_start);
      put_identity(w, row_done, col_done);
      put_op(w, row_start, col_done, site_terms[static_cast<std::size_t>(i)]);
      // New carries opened here.
      for (Index rho = 0; rho < rank_at(i); ++rho) {
        put_op(w, row_start, 1 + rho, coupling_ops[static_cast<std::size_t>(i)],
               a_fac[i](i, rho));
      }
      // Carries passing through and terminating.
      for (Index rho = 0; rho < rank_at(i - 1); ++rho) {
        put_op(w, 1 + rho, col_done, coupling_ops[static_cast<std::size_t>(i)],
               b_fac[i - 1](rho, 0));
        for (Index tau = 0; tau < rank_at(i); ++tau) {
          const double c = trans[i](rho, tau);
          if (c != 0.0) put_identity(w, 1 + rho, 1 + tau, c);
        }
      }
      for (int s = 0; s < ns; ++s) {
        put_op(w, 1 + rank_at(i - 1) + s, 1 + rank_at(i) + s,
               strings[s].ops[static_cast<std::size_t>(i)]);
      }
    }
    out.tensors.push_back(std::move(w));
  }
  return out;
}

Mpo mpo_add(const Mpo& a, const Mpo& b) {
  if (a.n_sites() != b.n_sites()) throw std::invalid_argument("mpo_add: site count mismatch");
  const int n = a.n_sites();
  Mpo out;
  out.energy_offset = a.energy_offset + b.energy_offset;
  for (int i = 0; i < n; ++i) {
    const DenseTensor& ta = a.site(i);
    const DenseTensor& tb = b.site(i);
    const Index d = ta.dim(1);
    if (tb.dim(1) != d || tb.dim(2) != ta.dim(2)) {
      throw std::invalid_argument("mpo_add: physical dimension mismatch");
    }
    const Index rl = i == 0 ? 1 : ta.dim(0) + tb.dim(0);
    const Index rr = i == n - 1 ? 1 : ta.dim(3) + tb.dim(3);
    DenseTensor w({rl, d, d, rr});
    const Index row_off = i == 0 ? 0 : ta.dim(0);
    const Index col_off = i == n - 1 ? 0 : ta.dim(3);
    for (Index r = 0; r < ta.dim(0); ++r) {
      for (Index x = 0; x < d; ++x) {
        for (Index y = 0; y < d; ++y) {
          for (Index c = 0; c < ta.dim(3); ++c) w({r, x, y, c}) += ta({r, x, y, c});
        }
      }
    }
    for (Index r = 0; r < tb.dim(0); ++r) {
      for (Index x = 0; x < d; ++x) {
        for (Index y = 0; y < d; ++y) {
          for (Index c = 0; c < tb.dim(3); ++c) {
            w({i == 0 ? r : r + row_off, x, y, i == n - 1 ? c : c + col_off}) += tb({r, x, y, c});
          }
        }
      }
    }
    out.tensors.push_back(std::move(w));
  }
  return out;
}

Mpo mpo_compress(const Mpo& op, double cutoff) {
  if (cutoff < 0.0) throw std::invalid_argument("mpo_compress: negative cutoff");
  Mpo out = op;
  const int n = out.n_sites();
  if (n == 1) return out;

  // Left-to-right orthogonalization (no truncation).
  for (int i = 0; i + 1 < n; ++i) {
    DenseTensor& w = out.site(i);
    const Index rl = w.dim(0), d_out = w.dim(1), d_in = w.dim(2), rr = w.dim(3);
    Eigen::HouseholderQR<Matrix> qr(w.as_matrix(3));
    const Index m = std::min(rl * d_out * d_in, rr);
    Matrix q = qr.householderQ() * Matrix::Identity(rl * d_out * d_in, m);
    Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    DenseTensor wq({rl, d_out, d_in, m});
    wq.as_matrix(3) = q;
    w = std::move(wq);
    DenseTensor& nxt = out.site(i + 1);
    DenseTensor merged = contract_last_first(DenseTensor::from_matrix(r), nxt.reshape({rr, nxt.size() / rr}));
    out.site(i + 1) = merged.reshape({m, nxt.dim(1), nxt.dim(2), nxt.dim(3)});
  }

  // Right-to-left truncating sweep.
  for (int i = n - 1; i > 0; --i) {
    DenseTensor& w = out.site(i);
    const Index rl = w.dim(0), d_out = w.dim(1), d_in = w.dim(2), rr = w.dim(3);
    const SvdResult svd = truncated_svd(w.as_matrix(1), cutoff, rl);
    const Index m = svd.s.size();
    DenseTensor wv({m, d_out, d_in, rr});
    wv.as_matrix(1) = svd.vh;
    w = std::move(wv);
    Matrix us = svd.u * svd.s.cast<Complex>().asDiagonal();
    DenseTensor& prv = out.site(i - 1);
    const Index pl = prv.dim(0), pd_out = prv.dim(1), pd_in = prv.dim(2);
    DenseTensor merged = contract_last_first(prv, DenseTensor::from_matrix(us));
    out.site(i - 1) = merged.reshape({pl, pd_out, pd_in, m});
  }
  return out;
}

}  // namespace tncirc
