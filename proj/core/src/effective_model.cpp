#include "tncirc/effective_model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tncirc/constants.hpp"

namespace tncirc {

namespace constants_ns = tncirc::constants;

double DecoupledModes::max_off_diagonal_ratio() const {
  const int n = n_modes();
  if (n < 2) return 0.0;
  double off = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) off = std::max(off, std::abs(block_cap(i, j)));
    }
  }
  return off / block_cap.diagonal().minCoeff();
}

DecoupledModes recursive_decoupling(const ThetaHamiltonian& h) {
  const int n = static_cast<int>(h.inv_cap.rows());
  Eigen::LLT<RealMatrix> llt(h.inv_cap);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("recursive_decoupling: inv_cap is not positive definite");
  }
  RealMatrix c = llt.solve(RealMatrix::Identity(n, n));
  c = 0.5 * (c + c.transpose()).eval();

  RealMatrix p_acc = RealMatrix::Identity(n, n);
  for (int step = 1; step <= n - 1; ++step) {
    const int pivot = step - 1;
    const int s = n - step + 1;  // active block size, pivot included
    const auto block = c.bottomRightCorner(s, s);
    const double total = block.sum();
    if (std::abs(total) < 1e-14 * std::max(1.0, block.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("recursive_decoupling: near-singular block at step " +
                                  std::to_string(step));
    }
    RealMatrix r = RealMatrix::Identity(n, n);
    double a_sum = 0.0;
    for (int k = step; k < n; ++k) {
      const double colsum = c.block(pivot, k, s, 1).sum();
      const double a_k = (static_cast<double>(s) * colsum - total) / total;
      r(pivot, k) = 1.0 + a_k;
      a_sum += a_k;
    }
    r(pivot, pivot) = 1.0 - a_sum;
    for (int k = step; k < n; ++k) {
      r(k, pivot) = -1.0;
      r(k, k) = 1.0;
    }
    const RealMatrix r_inv = r.inverse();
    c = (r_inv.transpose() * c * r_inv).eval();
    p_acc = (r * p_acc).eval();
  }

  DecoupledModes out;
  out.block_cap = c;
  out.mode_vectors = p_acc.inverse().transpose();  // v(n, i) = [P^{-1}]_{i n}
  out.big_v = out.mode_vectors.rowwise().sum();
  out.c_n_ff = c.diagonal();
  out.l_n_nh.resize(n);
  out.z_n.resize(n);
  for (int mode = 0; mode < n; ++mode) {
    double inv_l = 0.0;
    for (int i = 0; i < n; ++i) {
      const double l_ji =
          constants_ns::reduced_flux_quantum * constants_ns::reduced_flux_quantum /
          (h.e_j_ghz[static_cast<std::size_t>(i)] * 1e9 * constants_ns::planck_h) * 1e9;
      inv_l += out.mode_vectors(mode, i) * out.mode_vectors(mode, i) / l_ji;
    }
    out.l_n_nh[mode] = 1.0 / inv_l;
    out.z_n[mode] = std::sqrt(out.l_n_nh[mode] * 1e-9 / (out.c_n_ff[mode] * 1e-15)) /
                    constants_ns::resistance_quantum;
  }
  return out;
}

EffectiveModel effective_params(const DecoupledModes& modes, const ThetaHamiltonian& h,
                                bool renormalize) {
  const int n = modes.n_modes();
  EffectiveModel out;
  out.n_junctions = n;
  out.e_c_ghz = constants_ns::charging_energy_ghz(modes.block_cap(0, 0));
  out.x_i.assign(static_cast<std::size_t>(n), 1.0);
  out.x_b = 1.0;
  if (renormalize) {
    for (int i = 0; i < n; ++i) {
      double log_x = 0.0;
      for (int mode = 1; mode < n; ++mode) {
        log_x -= 0.5 * constants_ns::pi * modes.mode_vectors(mode, i) *
                 modes.mode_vectors(mode, i) * modes.z_n[mode];
      }
      out.x_i[static_cast<std::size_t>(i)] = std::exp(log_x);
    }
    double log_xb = 0.0;
    for (int mode = 1; mode < n; ++mode) {
      log_xb -= 0.5 * constants_ns::pi * modes.big_v[mode] * modes.big_v[mode] * modes.z_n[mode];
    }
    out.x_b = std::exp(log_xb);
  }
  double e_l = 0.0;
  for (int i = 0; i < n; ++i) {
    e_l += out.x_i[static_cast<std::size_t>(i)] * h.e_j_ghz[static_cast<std::size_t>(i)];
  }
  out.e_l_ghz = e_l / (static_cast<double>(n) * static_cast<double>(n));
  out.e_j_ghz = out.x_b * h.e_jb_ghz;
  return out;
}

Matrix displacement_matrix(Complex beta, int basis_size) {
  // Phase gauge a -> e^{i chi} a reduces D(beta) to D(|beta|), whose
  // generator is similar to a real symmetric tridiagonal matrix through
  // diag(i^m). The eigendecomposition route keeps D exactly unitary on the
  // retained block; a direct recurrence amplifies underflowed seeds at large
  // basis sizes.
  const int m = basis_size;
  const double b = std::abs(beta);
  const double chi = b > 0.0 ? std::arg(beta) : 0.0;

  RealMatrix tri = RealMatrix::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    tri(i + 1, i) = tri(i, i + 1) = -b * std::sqrt(static_cast<double>(i + 1));
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(tri);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("displacement_matrix: eigensolver failed");
  }
  Vector phases(m);
  for (int i = 0; i < m; ++i) {
    phases[i] = std::exp(Complex(0.0, -es.eigenvalues()[i]));
  }
  const Matrix core = es.eigenvectors().cast<Complex>() * phases.asDiagonal() *
                      es.eigenvectors().transpose().cast<Complex>();

  // Undo the diag(i^m) similarity and the phase gauge: entry (r, c) picks up
  // (-i)^r i^c from the similarity and e^{i (r - c) chi} from the gauge.
  Matrix d(m, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) {
      const int k = ((r - c) % 4 + 4) % 4;
      Complex twist(1.0, 0.0);
      switch (k) {
        case 1: twist = Complex(0.0, -1.0); break;
        case 2: twist = Complex(-1.0, 0.0); break;
        case 3: twist = Complex(0.0, 1.0); break;
        default: break;
      }
      d(r, c) = twist * core(r, c) * std::exp(Complex(0.0, (r - c) * chi));
    }
  }
  return d;
}

std::vector<double> SingleModeResult::transitions_ghz() const {
  std::vector<double> out;
  for (Index i = 1; i < energies.size(); ++i) out.push_back(energies[i] - energies[0]);
  return out;
}

SingleModeResult diagonalize_single_mode(const EffectiveModel& m, double phi_ext, int n_levels,
                                         int basis_size, bool full_cosine) {
  if (n_levels < 1) throw std::invalid_argument("diagonalize_single_mode: n_levels must be >= 1");
  if (basis_size < 4 * n_levels) {
    throw std::invalid_argument("diagonalize_single_mode: basis_size must be >= 4*n_levels");
  }
  if (m.e_c_ghz <= 0.0 || m.e_l_ghz <= 0.0) {
    throw std::invalid_argument("diagonalize_single_mode: E_C and E_L must be positive");
  }
  const int mm = basis_size;
  const double phi_zpf = std::pow(2.0 * m.e_c_ghz / m.e_l_ghz, 0.25);
  const double n_zpf = 0.5 / phi_zpf;
  const double omega = std::sqrt(8.0 * m.e_c_ghz * m.e_l_ghz);
  const double nj = static_cast<double>(m.n_junctions);

  Matrix h = Matrix::Zero(mm, mm);
  // 4 E_C n'^2 with n' = i n_zpf (a^dag - a).
  const double kin = 4.0 * m.e_c_ghz * n_zpf * n_zpf;
  for (int i = 0; i < mm; ++i) {
    h(i, i) += kin * (2.0 * i + 1.0);
    if (i + 2 < mm) {
      const double c = -kin * std::sqrt(static_cast<double>((i + 1) * (i + 2)));
      h(i, i + 2) += c;
      h(i + 2, i) += c;
    }
  }
  if (full_cosine) {
    const Matrix d = displacement_matrix(Complex(0.0, phi_zpf / nj), mm);
    h -= nj * nj * m.e_l_ghz * 0.5 * (d + d.adjoint());
  } else {
    const double pot = 0.5 * m.e_l_ghz * phi_zpf * phi_zpf;
    for (int i = 0; i < mm; ++i) {
      h(i, i) += pot * (2.0 * i + 1.0);
      if (i + 2 < mm) {
        const double c = pot * std::sqrt(static_cast<double>((i + 1) * (i + 2)));
        h(i, i + 2) += c;
        h(i + 2, i) += c;
      }
    }
  }
  if (m.e_j_ghz != 0.0) {
    const Matrix d = displacement_matrix(Complex(0.0, phi_zpf), mm);
    const Complex phase = std::exp(Complex(0.0, 2.0 * constants_ns::pi * phi_ext));
    h -= 0.5 * m.e_j_ghz * (phase * d + std::conj(phase) * d.adjoint());
  }

  const RealMatrix h_real = h.real();
  if ((h - h_real.cast<Complex>()).cwiseAbs().maxCoeff() >
      1e-11 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw std::runtime_error("diagonalize_single_mode: Hamiltonian has unexpected imaginary part");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h_real);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("diagonalize_single_mode: eigensolver failed");
  }

  SingleModeResult out;
  out.basis_frequency_ghz = omega;
  out.energies = es.eigenvalues().head(n_levels);
  RealMatrix u = es.eigenvectors().leftCols(n_levels);
  for (int j = 0; j < n_levels; ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) u.col(j) = -u.col(j);
  }
  out.level_converged.resize(static_cast<std::size_t>(n_levels));
  for (int j = 0; j < n_levels; ++j) {
    out.level_converged[static_cast<std::size_t>(j)] = u(mm - 1, j) * u(mm - 1, j) <= 1e-8;
  }

  Matrix op_n = Matrix::Zero(mm, mm);
  for (int i = 0; i + 1 < mm; ++i) {
    const Complex v = Complex(0.0, n_zpf) * std::sqrt(static_cast<double>(i + 1));
    op_n(i + 1, i) += v;   // i n_zpf a^dag
    op_n(i, i + 1) -= v;   // -i n_zpf a
  }
  const Matrix uc = u.cast<Complex>();
  out.op_n = uc.adjoint() * op_n * uc;
  out.op_exp_iphi = uc.adjoint() * displacement_matrix(Complex(0.0, phi_zpf), mm) * uc;
  out.op_t = uc.adjoint() * displacement_matrix(Complex(2.0 * constants_ns::pi * n_zpf, 0.0), mm) * uc;
  return out;
}

EffectiveModel effective_model_from_circuit(const CircuitParams& p, bool renormalize) {
  const ThetaHamiltonian theta = theta_transform(p);
  const DecoupledModes modes = recursive_decoupling(theta);
  return effective_params(modes, theta, renormalize);
}

}  // namespace tncirc
