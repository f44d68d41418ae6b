#include "tncirc/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tncirc/constants.hpp"

namespace tncirc {

namespace constants_ns = tncirc::constants;

CircuitParams CircuitParams::homogeneous(int n_junctions, double c_jb_ff, double e_jb_ghz,
                                         double omega_p_ghz, double z, double c0_ff,
                                         double phi_ext, double n_g) {
  CircuitParams p;
  p.n_junctions = n_junctions;
  p.c_jb_ff = c_jb_ff;
  p.e_jb_ghz = e_jb_ghz;
  p.c_j_ff.assign(static_cast<std::size_t>(n_junctions),
                  constants_ns::junction_capacitance_ff(omega_p_ghz, z));
  p.l_j_nh.assign(static_cast<std::size_t>(n_junctions),
                  constants_ns::junction_inductance_nh(omega_p_ghz, z));
  p.c0_ff.assign(static_cast<std::size_t>(n_junctions) + 1, c0_ff);
  p.cg_ff.assign(static_cast<std::size_t>(n_junctions) + 1, 0.0);
  p.vg_v.assign(static_cast<std::size_t>(n_junctions) + 1, 0.0);
  p.n_g.assign(static_cast<std::size_t>(n_junctions), n_g);
  p.phi_ext = phi_ext;
  p.validate();
  return p;
}

double CircuitParams::omega_p_ghz(int junction) const {
  const double l = l_j_nh[static_cast<std::size_t>(junction)] * 1e-9;
  const double c = c_j_ff[static_cast<std::size_t>(junction)] * 1e-15;
  return 1.0 / std::sqrt(l * c) / (2.0 * constants_ns::pi) * 1e-9;
}

double CircuitParams::reduced_impedance(int junction) const {
  const double l = l_j_nh[static_cast<std::size_t>(junction)] * 1e-9;
  const double c = c_j_ff[static_cast<std::size_t>(junction)] * 1e-15;
  return std::sqrt(l / c) / constants_ns::resistance_quantum;
}

void CircuitParams::set_uniform_ng(double value) {
  n_g.assign(static_cast<std::size_t>(n_junctions), value);
}

void CircuitParams::validate() const {
  const auto n = static_cast<std::size_t>(n_junctions);
  if (n_junctions < 1) throw std::invalid_argument("CircuitParams: n_junctions must be >= 1");
  if (c_jb_ff < 0.0) throw std::invalid_argument("CircuitParams: negative black-sheep capacitance");
  if (c_j_ff.size() != n || l_j_nh.size() != n || n_g.size() != n) {
    throw std::invalid_argument("CircuitParams: per-junction array size mismatch");
  }
  if (c0_ff.size() != n + 1 || cg_ff.size() != n + 1 || vg_v.size() != n + 1) {
    throw std::invalid_argument("CircuitParams: per-island array size mismatch");
  }
  for (double c : c_j_ff) {
    if (c <= 0.0) throw std::invalid_argument("CircuitParams: junction capacitances must be positive");
  }
  for (double l : l_j_nh) {
    if (l <= 0.0) throw std::invalid_argument("CircuitParams: junction inductances must be positive");
  }
  for (double c : c0_ff) {
    if (c < 0.0) throw std::invalid_argument("CircuitParams: negative ground capacitance");
  }
  for (double c : cg_ff) {
    if (c < 0.0) throw std::invalid_argument("CircuitParams: negative gate capacitance");
  }
}

RealMatrix capacitance_matrix(const CircuitParams& p) {
  p.validate();
  const int n = p.n_junctions;
  RealMatrix c = RealMatrix::Zero(n + 1, n + 1);
  auto add_pair = [&](int a, int b, double value) {
    c(a, a) += value;
    c(b, b) += value;
    c(a, b) -= value;
    c(b, a) -= value;
  };
  add_pair(0, n, p.c_jb_ff);
  for (int i = 1; i <= n; ++i) add_pair(i - 1, i, p.c_j_ff[static_cast<std::size_t>(i - 1)]);
  for (int i = 0; i <= n; ++i) c(i, i) += p.c0_ff[static_cast<std::size_t>(i)];
  if (c.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("capacitance_matrix: all capacitances are zero");
  }
  return c;
}

RealMatrix r_matrix(int n_junctions) {
  const int n = n_junctions;
  RealMatrix r = RealMatrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;       // Theta_{i+1} = Phi_i - Phi_{i+1}
    r(i, i + 1) = -1.0;
  }
  r.row(n).setOnes();    // Sigma = sum_i Phi_i
  return r;
}

double ThetaHamiltonian::site_charging_energy_ghz(int junction) const {
  return constants_ns::charging_energy_ghz(1.0 / inv_cap(junction, junction));
}

double ThetaHamiltonian::pair_coupling_ghz(int i, int j) const {
  const double e = constants_ns::elementary_charge;
  return 4.0 * e * e * inv_cap(i, j) * 1e15 / constants_ns::planck_h * 1e-9;
}

ThetaHamiltonian theta_transform(const CircuitParams& p) {
  const int n = p.n_junctions;
  RealMatrix c_phi = capacitance_matrix(p);
  for (int i = 0; i <= n; ++i) c_phi(i, i) += p.cg_ff[static_cast<std::size_t>(i)];

  const RealMatrix r = r_matrix(n);
  const RealMatrix r_inv = r.inverse();
  const RealMatrix c_theta = r_inv.transpose() * c_phi * r_inv;

  ThetaHamiltonian out;
  out.sigma_coupling = n > 0 ? c_theta.row(n).head(n).cwiseAbs().maxCoeff() : 0.0;

  const RealMatrix block = c_theta.topLeftCorner(n, n);
  Eigen::LLT<RealMatrix> llt(block);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(block, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    throw std::invalid_argument(
        "theta_transform: retained capacitance block is not positive definite "
        "(extreme eigenvalues " + std::to_string(lo) + ", " + std::to_string(hi) + " fF)");
  }
  out.inv_cap = llt.solve(RealMatrix::Identity(n, n));
  out.inv_cap = 0.5 * (out.inv_cap + out.inv_cap.transpose()).eval();

  out.e_j_ghz.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.e_j_ghz[static_cast<std::size_t>(i)] =
        constants_ns::inductive_energy_ghz(p.l_j_nh[static_cast<std::size_t>(i)]);
  }
  out.e_jb_ghz = p.e_jb_ghz;
  out.phi_ext = p.phi_ext;

  // Gate-network offsets: d_phi = C_g V on each island, transformed to the
  // theta basis and absorbed into the diagonal by completing the square.
  RealVector d_phi = RealVector::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    d_phi[i] = p.cg_ff[static_cast<std::size_t>(i)] * 1e-15 * p.vg_v[static_cast<std::size_t>(i)];
  }
  out.q_g = RealVector::Zero(n);
  if (d_phi.cwiseAbs().maxCoeff() > 0.0) {
    const RealVector d_theta = (r_inv.transpose() * d_phi).head(n);
    const RealVector cd = out.inv_cap * d_theta;
    for (int i = 0; i < n; ++i) {
      out.q_g[i] = -cd[i] / out.inv_cap(i, i) / (2.0 * constants_ns::elementary_charge);
    }
  }
  out.n_g_site.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.n_g_site[static_cast<std::size_t>(i)] = p.n_g[static_cast<std::size_t>(i)] + out.q_g[i];
  }
  return out;
}

int default_charge_cutoff(int d) { return std::max(60, 4 * d); }

SiteBasis site_eigenbasis(double e_c_ghz, double e_j_ghz, double n_g, int d, int charge_cutoff) {
  if (e_c_ghz <= 0.0) throw std::invalid_argument("site_eigenbasis: charging energy must be positive");
  if (d < 1) throw std::invalid_argument("site_eigenbasis: d must be >= 1");
  if (charge_cutoff < 3 * d) {
    throw std::invalid_argument("site_eigenbasis: charge_cutoff must be >= 3*d");
  }
  const int dim = 2 * charge_cutoff + 1;
  if (d > dim) throw std::invalid_argument("site_eigenbasis: d exceeds available states");

  RealMatrix h = RealMatrix::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    const double nval = m - charge_cutoff;
    h(m, m) = 4.0 * e_c_ghz * (nval - n_g) * (nval - n_g);
    if (m + 1 < dim) {
      h(m, m + 1) = -0.5 * e_j_ghz;
      h(m + 1, m) = -0.5 * e_j_ghz;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("site_eigenbasis: eigensolver failed");

  SiteBasis out;
  out.d = d;
  out.e_c_ghz = e_c_ghz;
  out.e_j_ghz = e_j_ghz;
  out.n_g = n_g;
  out.charge_cutoff = charge_cutoff;
  out.energies = es.eigenvalues().head(d);
  out.eigvecs = es.eigenvectors().leftCols(d);
  // Deterministic eigenvector phases: largest component positive.
  for (int j = 0; j < d; ++j) {
    Index imax = 0;
    out.eigvecs.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.eigvecs(imax, j) < 0.0) out.eigvecs.col(j) = -out.eigvecs.col(j);
  }
  out.charge_values.resize(dim);
  for (int m = 0; m < dim; ++m) out.charge_values[m] = m - charge_cutoff;

  RealMatrix shift = RealMatrix::Zero(dim, dim);  // e^{i theta}: |n> -> |n+1>
  for (int m = 0; m + 1 < dim; ++m) shift(m + 1, m) = 1.0;

  const RealMatrix& v = out.eigvecs;
  out.op_h0 = out.energies.asDiagonal().toDenseMatrix().cast<Complex>();
  out.op_n = (v.transpose() * out.charge_values.asDiagonal() * v).cast<Complex>();
  out.op_exp_itheta = (v.transpose() * shift * v).cast<Complex>();
  out.op_cos = (v.transpose() * (0.5 * (shift + shift.transpose())) * v).cast<Complex>();
  return out;
}

Matrix SiteBasis::phase_op(double alpha) const {
  const Index dim = charge_values.size();
  Vector phases(dim);
  for (Index m = 0; m < dim; ++m) {
    phases[m] = std::exp(Complex(0.0, alpha * charge_values[m]));
  }
  return eigvecs.cast<Complex>().adjoint() * phases.asDiagonal() * eigvecs.cast<Complex>();
}

CircuitOperators build_circuit_operators(const CircuitParams& p, int d, int charge_cutoff) {
  if (charge_cutoff <= 0) charge_cutoff = default_charge_cutoff(d);
  CircuitOperators out;
  out.theta = theta_transform(p);
  const int n = p.n_junctions;

  std::vector<Matrix> site_terms;
  std::vector<Matrix> coupling_ops;
  double offset = 0.0;
  for (int i = 0; i < n; ++i) {
    SiteBasis basis = site_eigenbasis(out.theta.site_charging_energy_ghz(i),
                                      out.theta.e_j_ghz[static_cast<std::size_t>(i)],
                                      out.theta.n_g_site[static_cast<std::size_t>(i)], d,
                                      charge_cutoff);
    offset += basis.ground_energy();
    Matrix shifted = basis.op_h0;
    shifted.diagonal().array() -= basis.ground_energy();
    site_terms.push_back(std::move(shifted));
    coupling_ops.push_back(basis.op_n);
    out.sites.push_back(std::move(basis));
  }

  RealMatrix g = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g(i, j) = out.theta.pair_coupling_ghz(i, j);
      g(j, i) = g(i, j);
    }
  }

  std::vector<OperatorString> strings;
  if (out.theta.e_jb_ghz != 0.0) {
    const double phase = 2.0 * constants_ns::pi * out.theta.phi_ext;
    OperatorString fwd, bwd;
    fwd.coeff = -0.5 * out.theta.e_jb_ghz * std::exp(Complex(0.0, phase));
    bwd.coeff = -0.5 * out.theta.e_jb_ghz * std::exp(Complex(0.0, -phase));
    for (int i = 0; i < n; ++i) {
      fwd.ops.push_back(out.sites[static_cast<std::size_t>(i)].op_exp_itheta);
      bwd.ops.push_back(out.sites[static_cast<std::size_t>(i)].op_exp_itheta.adjoint());
    }
    strings.push_back(std::move(fwd));
    strings.push_back(std::move(bwd));
  }

  out.hamiltonian = mpo_compress(build_sum_mpo(site_terms, coupling_ops, g, strings), 1e-14);
  out.hamiltonian.energy_offset = offset;
  return out;
}

Mpo build_hamiltonian_mpo(const CircuitParams& p, int d) {
  return build_circuit_operators(p, d).hamiltonian;
}

Mpo t_string_mpo(const std::vector<SiteBasis>& sites) {
  if (sites.empty()) throw std::invalid_argument("t_string_mpo: no sites");
  const double alpha = -2.0 * constants_ns::pi / static_cast<double>(sites.size());
  std::vector<Matrix> ops;
  for (const auto& s : sites) ops.push_back(s.phase_op(alpha));
  return product_mpo(ops);
}

}  // namespace tncirc
